#include "usast/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>
#include <stdexcept>

namespace usast {

EvaluationReport weighted_scores(const std::vector<std::string>& y_true,
                                 const std::vector<std::string>& y_pred) {
  if (y_true.empty()) throw std::invalid_argument("weighted_scores: empty");
  if (y_true.size() != y_pred.size())
    throw std::invalid_argument("weighted_scores: length mismatch");

  std::set<std::string> classes(y_true.begin(), y_true.end());
  classes.insert(y_pred.begin(), y_pred.end());
  std::vector<std::string> order(classes.begin(), classes.end());
  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < order.size(); ++i) index[order[i]] = i;

  const std::size_t k = order.size();
  EvaluationReport r;
  r.class_order = order;
  r.n_samples = y_true.size();
  r.confusion.assign(k, std::vector<std::size_t>(k, 0));
  std::size_t correct = 0;
  for (std::size_t i = 0; i < y_true.size(); ++i) {
    r.confusion[index[y_true[i]]][index[y_pred[i]]]++;
    if (y_true[i] == y_pred[i]) ++correct;
  }
  r.accuracy = static_cast<double>(correct) / y_true.size();

  for (std::size_t c = 0; c < k; ++c) {
    std::size_t tp = r.confusion[c][c], support = 0, predicted = 0;
    for (std::size_t j = 0; j < k; ++j) {
      support += r.confusion[c][j];
      predicted += r.confusion[j][c];
    }
    ClassScore s;
    s.class_id = order[c];
    s.support = support;
    s.zero_predicted = predicted == 0;
    s.precision = predicted ? static_cast<double>(tp) / predicted : 0.0;
    s.recall = support ? static_cast<double>(tp) / support : 0.0;
    s.f1 = (s.precision + s.recall) > 0.0
               ? 2.0 * s.precision * s.recall / (s.precision + s.recall)
               : 0.0;
    r.per_class.push_back(s);

    const double w = static_cast<double>(support) / y_true.size();
    r.precision += w * s.precision;
    r.recall += w * s.recall;
    r.f1 += w * s.f1;
  }
  return r;
}

double cross_entropy(const std::vector<std::string>& y_true,
                     const std::vector<std::vector<double>>& proba,
                     const std::vector<std::string>& class_order,
                     double clip) {
  if (y_true.size() != proba.size())
    throw std::invalid_argument("cross_entropy: length mismatch");
  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < class_order.size(); ++i) index[class_order[i]] = i;

  double loss = 0.0;
  for (std::size_t i = 0; i < y_true.size(); ++i) {
    double sum = 0.0;
    for (double p : proba[i]) sum += p;
    if (std::abs(sum - 1.0) > 1e-6)
      throw std::invalid_argument("cross_entropy: probability row " +
                                  std::to_string(i) + " sums to " +
                                  std::to_string(sum));
    auto it = index.find(y_true[i]);
    if (it == index.end())
      throw std::invalid_argument("cross_entropy: unknown class " + y_true[i]);
    const double p =
        std::clamp(proba[i][it->second], clip, 1.0 - clip);
    loss -= std::log(p);
  }
  return loss / static_cast<double>(y_true.size());
}

namespace {

void collect_groups(
    const std::vector<std::map<std::string, std::string>>& metadata,
    const std::vector<std::string>& columns, std::size_t col,
    std::map<std::string, std::string>& filter,
    std::vector<std::map<std::string, std::string>>& out) {
  if (col == columns.size()) {
    out.push_back(filter);
    return;
  }
  std::set<std::string> values;
  for (const auto& m : metadata) {
    auto it = m.find(columns[col]);
    if (it == m.end())
      throw std::invalid_argument("grouped_report: missing metadata key " +
                                  columns[col]);
    values.insert(it->second);
  }
  for (const auto& v : values) {
    filter[columns[col]] = v;
    collect_groups(metadata, columns, col + 1, filter, out);
  }
  filter[columns[col]] = "Both";  // marginal over this column
  collect_groups(metadata, columns, col + 1, filter, out);
  filter.erase(columns[col]);
}

}  // namespace

std::vector<EvaluationReport> grouped_report(
    const std::vector<std::string>& y_true,
    const std::vector<std::string>& y_pred,
    const std::vector<std::map<std::string, std::string>>& metadata,
    const std::vector<std::string>& group_columns) {
  if (metadata.size() != y_true.size())
    throw std::invalid_argument("grouped_report: metadata length mismatch");

  std::vector<std::map<std::string, std::string>> filters;
  std::map<std::string, std::string> scratch;
  collect_groups(metadata, group_columns, 0, scratch, filters);

  std::vector<EvaluationReport> reports;
  for (const auto& filter : filters) {
    std::vector<std::string> gt, gp;
    for (std::size_t i = 0; i < y_true.size(); ++i) {
      bool match = true;
      for (const auto& [key, want] : filter) {
        if (want == "Both") continue;
        if (metadata[i].at(key) != want) {
          match = false;
          break;
        }
      }
      if (match) {
        gt.push_back(y_true[i]);
        gp.push_back(y_pred[i]);
      }
    }
    if (gt.empty()) continue;
    EvaluationReport r = weighted_scores(gt, gp);
    std::string key;
    for (const auto& col : group_columns) {
      if (!key.empty()) key += '|';
      key += col + "=" + filter.at(col);
    }
    r.group_key = key;
    reports.push_back(std::move(r));
  }
  return reports;
}

BinaryScore one_vs_rest_report(const std::vector<std::string>& y_true,
                               const std::vector<std::string>& y_pred,
                               const std::string& positive_class) {
  if (std::find(y_true.begin(), y_true.end(), positive_class) == y_true.end())
    throw std::invalid_argument("one_vs_rest_report: class " + positive_class +
                                " not present in y_true");
  std::size_t tp = 0, fp = 0, fn = 0;
  for (std::size_t i = 0; i < y_true.size(); ++i) {
    const bool t = y_true[i] == positive_class;
    const bool p = y_pred[i] == positive_class;
    if (t && p) ++tp;
    if (!t && p) ++fp;
    if (t && !p) ++fn;
  }
  BinaryScore s;
  s.zero_predicted = (tp + fp) == 0;
  s.precision = (tp + fp) ? static_cast<double>(tp) / (tp + fp) : 0.0;
  s.recall = (tp + fn) ? static_cast<double>(tp) / (tp + fn) : 0.0;
  s.f1 = (s.precision + s.recall) > 0.0
             ? 2.0 * s.precision * s.recall / (s.precision + s.recall)
             : 0.0;
  return s;
}

std::string report_to_text(const EvaluationReport& r) {
  std::ostringstream os;
  if (!r.group_key.empty()) os << "[" << r.group_key << "]\n";
  os.precision(4);
  os << std::fixed;
  os << "samples: " << r.n_samples << "\n";
  os << "weighted precision: " << r.precision << "  recall: " << r.recall
     << "  f1: " << r.f1 << "  accuracy: " << r.accuracy;
  if (r.log_loss) os << "  logloss: " << *r.log_loss;
  os << "\n";
  os << "class          prec    recall  f1      support\n";
  for (const auto& c : r.per_class) {
    os << c.class_id;
    for (std::size_t i = c.class_id.size(); i < 15; ++i) os << ' ';
    os << c.precision << "  " << c.recall << "  " << c.f1 << "  " << c.support;
    if (c.zero_predicted) os << "  (never predicted)";
    os << "\n";
  }
  return os.str();
}

}  // namespace usast

#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace usast {

struct ClassScore {
  std::string class_id;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::size_t support = 0;
  bool zero_predicted = false;  // precision defined-as-0 flag
};

struct EvaluationReport {
  double precision = 0.0;  // support-weighted averages
  double recall = 0.0;
  double f1 = 0.0;
  double accuracy = 0.0;
  std::optional<double> log_loss;
  std::vector<ClassScore> per_class;
  std::vector<std::string> class_order;
  std::vector<std::vector<std::size_t>> confusion;  // [true][pred]
  std::string group_key;  // empty for the marginal report
  std::size_t n_samples = 0;
};

EvaluationReport weighted_scores(const std::vector<std::string>& y_true,
                                 const std::vector<std::string>& y_pred);

// Mean over samples of -log(clipped probability of the true class).
// `class_order` maps probability columns to class ids.
double cross_entropy(const std::vector<std::string>& y_true,
                     const std::vector<std::vector<double>>& proba,
                     const std::vector<std::string>& class_order,
                     double clip = 1e-15);

// One report per combination of the group columns' values, including "Both"
// marginals over each column, keyed e.g. "ddf=1|galactic=Both".
std::vector<EvaluationReport> grouped_report(
    const std::vector<std::string>& y_true,
    const std::vector<std::string>& y_pred,
    const std::vector<std::map<std::string, std::string>>& metadata,
    const std::vector<std::string>& group_columns);

struct BinaryScore {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  bool zero_predicted = false;
};

BinaryScore one_vs_rest_report(const std::vector<std::string>& y_true,
                               const std::vector<std::string>& y_pred,
                               const std::string& positive_class);

std::string report_to_text(const EvaluationReport& r);

}  // namespace usast

#include "voxsel/metrics.hpp"

#include <cmath>

namespace voxsel {

ConfusionTable confusion(const std::vector<int>& y_true, const std::vector<int>& y_pred,
                         int positive) {
    if (y_true.size() != y_pred.size())
        throw ArgumentError("confusion: y_true and y_pred lengths differ (" +
                            std::to_string(y_true.size()) + " vs " +
                            std::to_string(y_pred.size()) + ")");
    ConfusionTable c;
    for (std::size_t i = 0; i < y_true.size(); ++i) {
        const bool t = y_true[i] == positive;
        const bool p = y_pred[i] == positive;
        if (t && p)
            ++c.tp;
        else if (!t && p)
            ++c.fp;
        else if (t && !p)
            ++c.fn;
        else
            ++c.tn;
    }
    return c;
}

namespace {

double f1_for(const ConfusionTable& c) {
    const double prec = (c.tp + c.fp) > 0 ? static_cast<double>(c.tp) / (c.tp + c.fp) : 0.0;
    const double rec = (c.tp + c.fn) > 0 ? static_cast<double>(c.tp) / (c.tp + c.fn) : 0.0;
    if (prec + rec == 0.0) return 0.0;
    return 2.0 * prec * rec / (prec + rec);
}

}  // namespace

double macro_f1(const std::vector<int>& y_true, const std::vector<int>& y_pred) {
    const double f1_pos = f1_for(confusion(y_true, y_pred, 1));
    const double f1_neg = f1_for(confusion(y_true, y_pred, 0));
    return 0.5 * (f1_pos + f1_neg);
}

double mcc(const ConfusionTable& c) {
    const double a = static_cast<double>(c.tp + c.fp);
    const double b = static_cast<double>(c.tp + c.fn);
    const double d = static_cast<double>(c.tn + c.fp);
    const double e = static_cast<double>(c.tn + c.fn);
    if (a == 0.0 || b == 0.0 || d == 0.0 || e == 0.0) return 0.0;
    const double num = static_cast<double>(c.tp) * static_cast<double>(c.tn) -
                       static_cast<double>(c.fp) * static_cast<double>(c.fn);
    // paired square roots: overflow-safe and exact on degenerate tables,
    // where each pairwise product is a perfect square
    return num / (std::sqrt(a * b) * std::sqrt(d * e));
}

double accuracy(const ConfusionTable& c) {
    if (c.total() == 0) throw ArgumentError("accuracy: empty confusion table");
    return static_cast<double>(c.tp + c.tn) / static_cast<double>(c.total());
}

EvaluationRecord evaluate(int rep_id, const std::string& config_id,
                          const std::vector<int>& y_true, const std::vector<int>& y_pred) {
    EvaluationRecord r;
    r.rep_id = rep_id;
    r.config_id = config_id;
    r.table = confusion(y_true, y_pred, 1);
    r.macro_f1 = macro_f1(y_true, y_pred);
    r.mcc = mcc(r.table);
    r.accuracy = accuracy(r.table);
    return r;
}

MeanSd mean_sd(const std::vector<double>& values) {
    MeanSd out;
    if (values.empty()) return out;
    double sum = 0.0;
    for (double v : values) sum += v;
    out.mean = sum / static_cast<double>(values.size());
    double sq = 0.0;
    for (double v : values) sq += (v - out.mean) * (v - out.mean);
    out.sd = std::sqrt(sq / static_cast<double>(values.size()));
    return out;
}

}  // namespace voxsel

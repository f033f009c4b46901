#include "yieldopt/report.hpp"

#include <charconv>
#include <cmath>
#include "json.hpp"

namespace yieldopt {

namespace {

std::string kind_name(EntryKind kind) {
  switch (kind) {
    case EntryKind::iteration: return "iteration";
    case EntryKind::evaluation: return "evaluation";
    case EntryKind::final_estimate: return "final";
  }
  return "unknown";
}

std::vector<double> to_std(const Vector& v) { return {v.data(), v.data() + v.size()}; }

}  // namespace

std::string format_real(double value) {
  if (std::isnan(value)) {
    return "nan";
  }
  char buffer[64];
  const auto result = std::to_chars(buffer, buffer + sizeof(buffer), value);
  return std::string(buffer, result.ptr);
}

void write_iterations_csv(std::ostream& out, const std::vector<RunRecord>& records) {
  Eigen::Index np = 0, nd = 0;
  for (const auto& r : records) {
    if (!r.entries.empty()) {
      np = std::max(np, r.entries.front().point.uncertain_mean.size());
      nd = std::max(nd, r.entries.front().point.deterministic.size());
    }
  }
  out << "strategy,iteration,kind,n_samples,yield,sigma,grad_norm,cum_yield_evals,cum_qoi_evals,"
         "cum_full_model_evals";
  for (Eigen::Index i = 0; i < np; ++i) out << ",p" << i + 1;
  for (Eigen::Index i = 0; i < nd; ++i) out << ",d" << i + 1;
  out << ",step_norm,steepest_fallback\n";
  for (const auto& r : records) {
    for (const auto& e : r.entries) {
      out << r.strategy << ',' << e.iteration << ',' << kind_name(e.kind) << ',' << e.n_samples << ','
          << format_real(e.yield) << ',' << format_real(e.sigma) << ',' << format_real(e.grad_norm) << ','
          << e.cum_yield_evals << ',' << e.cum_qoi_evals << ',' << e.cum_full_model_evals;
      for (Eigen::Index i = 0; i < e.point.uncertain_mean.size(); ++i) {
        out << ',' << format_real(e.point.uncertain_mean[i]);
      }
      for (Eigen::Index i = 0; i < e.point.deterministic.size(); ++i) {
        out << ',' << format_real(e.point.deterministic[i]);
      }
      out << ',' << format_real(e.step_norm) << ',' << (e.steepest_fallback ? 1 : 0) << '\n';
    }
  }
}

void write_summary_json(std::ostream& out, const std::vector<RunRecord>& records, std::uint64_t seed) {
  nlohmann::ordered_json doc;
  doc["seed"] = seed;
  doc["counting"] =
      "yield_evals counts every classification of a full sample set, including line-search trials, "
      "finite-difference perturbations and the final n_max re-estimate; full_model_evals counts "
      "true-model QoI calls, one per (sample, grid point)";
  doc["strategies"] = nlohmann::ordered_json::array();
  for (const auto& r : records) {
    nlohmann::ordered_json s;
    s["name"] = r.strategy;
    s["status"] = to_string(r.status);
    if (!r.message.empty()) {
      s["message"] = r.message;
    }
    s["final_yield"] = r.final_estimate.value;
    s["final_sigma"] = r.final_estimate.sigma;
    s["final_n_samples"] = r.final_estimate.n_samples;
    s["optimum"] = {{"uncertain_mean", to_std(r.optimum.uncertain_mean)},
                    {"deterministic", to_std(r.optimum.deterministic)}};
    s["total_yield_evals"] = r.total_yield_evals();
    s["total_qoi_evals"] = r.total_qoi_evals();
    s["total_full_model_evals"] = r.total_full_model_evals();
    s["entries"] = r.entries.size();
    doc["strategies"].push_back(std::move(s));
  }
  out << doc.dump(2) << '\n';
}

void write_plot_csv(std::ostream& out, const std::vector<RunRecord>& records) {
  out << "strategy,cum_full_model_evals,yield\n";
  for (const auto& r : records) {
    for (const auto& e : r.entries) {
      out << r.strategy << ',' << e.cum_full_model_evals << ',' << format_real(e.yield) << '\n';
    }
  }
}

}  // namespace yieldopt

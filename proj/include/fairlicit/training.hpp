#pragma once

#include <cmath>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "fairlicit/analysis.hpp"
#include "fairlicit/encoding.hpp"
#include "fairlicit/metrics.hpp"
#include "fairlicit/synthetic.hpp"

namespace fairlicit {

inline constexpr double kDefaultMargin = 0.1;

enum class ConstraintKind { strict, equal };
enum class ConstraintPolicy { per_participant, borda_aggregate };

inline std::string_view to_string(ConstraintKind k) { return k == ConstraintKind::strict ? "strict" : "equal"; }
inline std::string_view to_string(ConstraintPolicy p) {
  return p == ConstraintPolicy::per_participant ? "per_participant" : "borda_aggregate";
}
inline ConstraintPolicy parse_policy(std::string_view s) {
  if (s == "per_participant") return ConstraintPolicy::per_participant;
  if (s == "borda_aggregate") return ConstraintPolicy::borda_aggregate;
  throw ValidationError("policy: unknown value '" + std::string(s) + "'");
}

// strict: score(hi) should exceed score(lo) by `margin`.
// equal: score(a) should match score(b).
struct PairConstraint {
  ConstraintKind kind = ConstraintKind::strict;
  CaseId hi, lo;
  CaseId a, b;
  double margin = kDefaultMargin;
  double weight = 1.0;

  static PairConstraint strict(CaseId hi, CaseId lo, double margin = kDefaultMargin, double weight = 1.0) {
    return {ConstraintKind::strict, std::move(hi), std::move(lo), {}, {}, margin, weight};
  }
  static PairConstraint equal(CaseId a, CaseId b, double margin = kDefaultMargin, double weight = 1.0) {
    return {ConstraintKind::equal, {}, {}, std::move(a), std::move(b), margin, weight};
  }
  bool operator==(const PairConstraint&) const = default;
};

inline void validate(const PairConstraint& c) {
  if (!std::isfinite(c.margin) || c.margin < 0.0) throw ValidationError("constraint: margin must be finite and >= 0");
  if (!std::isfinite(c.weight) || c.weight < 0.0) throw ValidationError("constraint: weight must be finite and >= 0");
  if (c.kind == ConstraintKind::strict && c.hi == c.lo)
    throw ValidationError("constraint: strict constraint needs two distinct cases");
}

// Maps judgments to constraints. With a dataset, every referenced case must
// exist in it.
inline std::vector<PairConstraint> derive_constraints(const std::vector<PairJudgment>& judgments,
                                                      ConstraintPolicy policy,
                                                      const Dataset* dataset = nullptr,
                                                      double margin = kDefaultMargin) {
  if (dataset) {
    std::set<std::string> ids;
    for (const auto& c : dataset->cases) ids.insert(c.id);
    for (const auto& j : judgments)
      for (const auto* id : {&j.case_a, &j.case_b})
        if (!ids.count(*id)) throw UnknownCase("judgment references unknown case '" + *id + "'");
  }
  std::vector<PairConstraint> out;
  if (policy == ConstraintPolicy::per_participant) {
    for (const auto& j : judgments) {
      switch (j.choice) {
        case PairChoice::prioritize_a: out.push_back(PairConstraint::strict(j.case_a, j.case_b, margin)); break;
        case PairChoice::prioritize_b: out.push_back(PairConstraint::strict(j.case_b, j.case_a, margin)); break;
        case PairChoice::equal: out.push_back(PairConstraint::equal(j.case_a, j.case_b, margin)); break;
        default: break;
      }
    }
    return out;
  }

  // One constraint per unordered pair, in order of first appearance.
  std::vector<std::pair<CaseId, CaseId>> keys;
  std::map<std::pair<CaseId, CaseId>, std::vector<PairJudgment>> groups;
  for (const auto& j : judgments) {
    if (is_abstention(j.choice)) continue;
    auto key = id_less(j.case_b, j.case_a) ? std::pair(j.case_b, j.case_a) : std::pair(j.case_a, j.case_b);
    auto [it, fresh] = groups.try_emplace(key);
    if (fresh) keys.push_back(key);
    it->second.push_back(j);
  }
  for (const auto& key : keys) {
    const auto r = borda_aggregate({key.first, key.second}, groups.at(key));
    if (r.has_ties)
      out.push_back(PairConstraint::equal(key.first, key.second, margin));
    else
      out.push_back(PairConstraint::strict(r.ranking[0].id, r.ranking[1].id, margin));
  }
  return out;
}

// Adds the fixture cases a set of judgments refers to when the dataset lacks
// them, so constraints on fixture pairs can be trained on.
inline Dataset with_referenced_fixtures(Dataset d, const std::vector<PairJudgment>& judgments,
                                        const FixturePairSet& fixtures = default_fixture_pairs()) {
  std::set<std::string> ids;
  for (const auto& c : d.cases) ids.insert(c.id);
  for (const auto& j : judgments)
    for (const auto* id : {&j.case_a, &j.case_b})
      if (!ids.count(*id) && fixtures.find_case(*id)) return with_fixture_cases(std::move(d), fixtures);
  return d;
}

struct TrainingConfig {
  double lambda_pair = 1.0;
  double lambda_parity = 0.0;
  double lambda_odds = 0.0;
  double margin = kDefaultMargin;  // used when constraints are derived for training
  double l2 = 1e-2;
  std::set<std::string> excluded_attributes;
  // Attributes whose subgroup gaps are penalized; empty means the schema's
  // sensitive attributes.
  std::vector<std::string> fairness_attributes;
  std::uint64_t seed = 0;
  int max_iterations = 20000;
  double tolerance = 1e-9;  // on the gradient norm

  bool operator==(const TrainingConfig&) const = default;
};

inline void validate(const TrainingConfig& c, const FeatureSchema& schema) {
  for (double v : {c.lambda_pair, c.lambda_parity, c.lambda_odds, c.margin, c.l2})
    if (!std::isfinite(v) || v < 0.0) throw ValidationError("config: weights and margins must be finite and >= 0");
  if (c.max_iterations < 0) throw ValidationError("config: max_iterations must be >= 0");
  if (!std::isfinite(c.tolerance) || c.tolerance < 0.0) throw ValidationError("config: tolerance must be >= 0");
  validate(AwarenessConfig{c.excluded_attributes}, schema);
  for (const auto& a : c.fairness_attributes)
    if (!schema.index_of(a)) throw UnknownAttribute("unknown fairness attribute '" + a + "'");
}

struct ConstrainedModel {
  FeatureSchema schema;
  std::vector<std::string> coordinate_names;
  std::vector<double> coefficients;
  double intercept = 0.0;
  double threshold = 0.5;
  TrainingConfig config;

  Encoder encoder() const { return Encoder(schema, config.excluded_attributes); }

  double score(const Case& c) const {
    const auto x = encoder().encode(c);
    double z = intercept;
    for (std::size_t k = 0; k < x.size(); ++k) z += coefficients[k] * x[k];
    return logistic(z);
  }

  bool operator==(const ConstrainedModel&) const = default;
};

struct LossTerms {
  double cross_entropy = 0.0;
  double l2 = 0.0;
  double pair_strict = 0.0;
  double pair_equal = 0.0;
  double parity = 0.0;
  double odds = 0.0;

  double total() const { return cross_entropy + l2 + pair_strict + pair_equal + parity + odds; }
};

// The training objective over a fixed dataset, parameterized by
// theta = (coefficients..., intercept).
class Objective {
 public:
  Objective(const Dataset& d, const std::vector<PairConstraint>& constraints, const TrainingConfig& config)
      : config_(config), encoder_(d.schema, config.excluded_attributes) {
    if (d.cases.empty()) throw EmptyDataset("dataset has no cases");
    validate(config, d.schema);
    if (!d.has_labels()) throw MissingLabels("training needs a true label on every case");
    n_ = d.cases.size();
    dim_ = encoder_.dim();
    x_ = encoder_.encode_all(d.cases);
    y_.reserve(n_);
    for (const auto& c : d.cases) y_.push_back(*c.true_label == Label::high ? 1.0 : 0.0);

    std::unordered_map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < n_; ++i) index.emplace(d.cases[i].id, i);
    auto lookup = [&](const CaseId& id) {
      auto it = index.find(id);
      if (it == index.end()) throw UnknownCase("constraint references unknown case '" + id + "'");
      return it->second;
    };
    for (const auto& c : constraints) {
      validate(c);
      if (c.kind == ConstraintKind::strict)
        strict_.push_back({lookup(c.hi), lookup(c.lo), c.margin, c.weight});
      else
        equal_.push_back({lookup(c.a), lookup(c.b), c.margin, c.weight});
    }

    auto attrs = config.fairness_attributes;
    if (attrs.empty()) attrs = d.schema.sensitive_attributes;
    for (const auto& a : attrs) {
      const auto f = d.schema.require_index(a);
      const auto& def = d.schema.features[f];
      Partition all(def.values.size()), low(def.values.size()), high(def.values.size());
      for (std::size_t i = 0; i < n_; ++i) {
        const auto v = *def.index_of(d.cases[i].values[f]);
        all[v].push_back(i);
        (y_[i] > 0.5 ? high : low)[v].push_back(i);
      }
      parity_.push_back(drop_empty(std::move(all)));
      fpr_.push_back(drop_empty(std::move(low)));
      fnr_.push_back(drop_empty(std::move(high)));
    }
  }

  std::size_t size() const noexcept { return dim_ + 1; }
  const Encoder& encoder() const noexcept { return encoder_; }

  std::vector<double> scores(const std::vector<double>& theta) const {
    std::vector<double> z(n_), s(n_);
    logits(theta, z);
    for (std::size_t i = 0; i < n_; ++i) s[i] = logistic(z[i]);
    return s;
  }

  LossTerms terms(const std::vector<double>& theta) const { return evaluate(theta, nullptr); }
  double value(const std::vector<double>& theta) const { return evaluate(theta, nullptr).total(); }

  std::vector<double> gradient(const std::vector<double>& theta) const {
    std::vector<double> g(size());
    evaluate(theta, &g);
    return g;
  }

  // Sum over pairs of populated subgroups of squared mean-score gaps.
  double smoothed_parity(const std::vector<double>& theta) const {
    const auto s = scores(theta);
    double out = 0.0;
    for (const auto& p : parity_) out += gap_term(p, s, false, nullptr);
    return out;
  }

 private:
  using Partition = std::vector<std::vector<std::size_t>>;
  struct Link {
    std::size_t i, j;
    double margin, weight;
  };

  static Partition drop_empty(Partition p) {
    Partition out;
    for (auto& g : p)
      if (!g.empty()) out.push_back(std::move(g));
    return out;
  }

  void logits(const std::vector<double>& theta, std::vector<double>& z) const {
    for (std::size_t i = 0; i < n_; ++i) {
      const double* xi = x_.data() + i * dim_;
      double v = theta[dim_];
      for (std::size_t k = 0; k < dim_; ++k) v += theta[k] * xi[k];
      z[i] = v;
    }
  }

  // Sum_{k<l} (m_k - m_l)^2 where m_k is the mean of s (or 1 - s) over group
  // k. Adds d/ds into ds when given.
  static double gap_term(const Partition& groups, const std::vector<double>& s, bool complement,
                         std::vector<double>* ds, double scale = 1.0) {
    const std::size_t g = groups.size();
    if (g < 2) return 0.0;
    std::vector<double> m(g, 0.0);
    for (std::size_t k = 0; k < g; ++k) {
      for (auto i : groups[k]) m[k] += complement ? 1.0 - s[i] : s[i];
      m[k] /= static_cast<double>(groups[k].size());
    }
    double out = 0.0;
    for (std::size_t k = 0; k < g; ++k)
      for (std::size_t l = k + 1; l < g; ++l) out += (m[k] - m[l]) * (m[k] - m[l]);
    if (ds) {
      for (std::size_t k = 0; k < g; ++k) {
        double dm = 0.0;
        for (std::size_t l = 0; l < g; ++l) dm += 2.0 * (m[k] - m[l]);
        const double per = scale * dm / static_cast<double>(groups[k].size()) * (complement ? -1.0 : 1.0);
        for (auto i : groups[k]) (*ds)[i] += per;
      }
    }
    return out;
  }

  static double softplus(double z) { return z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }

  LossTerms evaluate(const std::vector<double>& theta, std::vector<double>* grad) const {
    if (theta.size() != size()) throw ValidationError("parameter vector has the wrong length");
    std::vector<double> z(n_), s(n_);
    logits(theta, z);
    for (std::size_t i = 0; i < n_; ++i) s[i] = logistic(z[i]);

    LossTerms t;
    std::vector<double> dz(grad ? n_ : 0, 0.0), ds(grad ? n_ : 0, 0.0);
    const double inv_n = 1.0 / static_cast<double>(n_);
    for (std::size_t i = 0; i < n_; ++i) {
      t.cross_entropy += (softplus(z[i]) - y_[i] * z[i]) * inv_n;
      if (grad) dz[i] = (s[i] - y_[i]) * inv_n;
    }
    for (std::size_t k = 0; k < dim_; ++k) t.l2 += config_.l2 * theta[k] * theta[k];

    const double lp = config_.lambda_pair;
    for (const auto& c : strict_) {
      const double h = c.margin - (s[c.i] - s[c.j]);
      if (h <= 0.0) continue;
      t.pair_strict += lp * c.weight * h * h;
      if (grad) {
        ds[c.i] -= 2.0 * lp * c.weight * h;
        ds[c.j] += 2.0 * lp * c.weight * h;
      }
    }
    for (const auto& c : equal_) {
      const double diff = s[c.i] - s[c.j];
      t.pair_equal += lp * c.weight * diff * diff;
      if (grad) {
        ds[c.i] += 2.0 * lp * c.weight * diff;
        ds[c.j] -= 2.0 * lp * c.weight * diff;
      }
    }

    auto* dsp = grad ? &ds : nullptr;
    if (config_.lambda_parity > 0.0)
      for (const auto& p : parity_)
        t.parity += config_.lambda_parity * gap_term(p, s, false, dsp, config_.lambda_parity);
    if (config_.lambda_odds > 0.0) {
      for (const auto& p : fpr_) t.odds += config_.lambda_odds * gap_term(p, s, false, dsp, config_.lambda_odds);
      for (const auto& p : fnr_) t.odds += config_.lambda_odds * gap_term(p, s, true, dsp, config_.lambda_odds);
    }

    if (grad) {
      auto& g = *grad;
      std::fill(g.begin(), g.end(), 0.0);
      for (std::size_t i = 0; i < n_; ++i) {
        const double dzi = dz[i] + ds[i] * s[i] * (1.0 - s[i]);
        const double* xi = x_.data() + i * dim_;
        for (std::size_t k = 0; k < dim_; ++k) g[k] += dzi * xi[k];
        g[dim_] += dzi;
      }
      for (std::size_t k = 0; k < dim_; ++k) g[k] += 2.0 * config_.l2 * theta[k];
    }
    return t;
  }

  TrainingConfig config_;
  Encoder encoder_;
  std::size_t n_ = 0, dim_ = 0;
  std::vector<double> x_, y_;
  std::vector<Link> strict_, equal_;
  std::vector<Partition> parity_, fpr_, fnr_;
};

struct Convergence {
  int iterations = 0;
  double gradient_norm = 0.0;
  bool converged = false;
};

struct AttributeGaps {
  std::string attribute;
  std::optional<Ratio> parity_gap;
  std::optional<Ratio> fpr_gap;
  std::optional<Ratio> fnr_gap;
};

struct TrainingReport {
  double objective = 0.0;
  LossTerms terms;
  std::int64_t strict_constraints = 0;
  std::int64_t strict_satisfied = 0;
  Rate satisfied_fraction;  // undefined without strict constraints
  std::int64_t equal_constraints = 0;
  std::vector<AttributeGaps> gaps;  // hard predictions at the model threshold
  std::optional<Convergence> convergence;
};

inline std::vector<double> parameters(const ConstrainedModel& m) {
  auto theta = m.coefficients;
  theta.push_back(m.intercept);
  return theta;
}

// Recomputes every report quantity for a model on a dataset.
inline TrainingReport evaluate(const ConstrainedModel& model, const Dataset& d,
                               const std::vector<PairConstraint>& constraints) {
  if (!(model.schema == d.schema)) throw SchemaMismatch("model and dataset schemas differ");
  const Objective obj(d, constraints, model.config);
  const auto theta = parameters(model);
  TrainingReport r;
  r.terms = obj.terms(theta);
  r.objective = r.terms.total();

  const auto s = obj.scores(theta);
  std::unordered_map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < d.cases.size(); ++i) index.emplace(d.cases[i].id, i);
  for (const auto& c : constraints) {
    if (c.kind == ConstraintKind::equal) {
      ++r.equal_constraints;
      continue;
    }
    ++r.strict_constraints;
    if (s[index.at(c.hi)] - s[index.at(c.lo)] >= c.margin) ++r.strict_satisfied;
  }
  r.satisfied_fraction = make_rate(r.strict_satisfied, r.strict_constraints);

  Dataset scored = d;
  for (std::size_t i = 0; i < scored.cases.size(); ++i) {
    scored.cases[i].score = s[i];
    scored.cases[i].prediction = binarize(s[i], model.threshold);
  }
  auto attrs = model.config.fairness_attributes;
  if (attrs.empty()) attrs = d.schema.sensitive_attributes;
  for (const auto& a : attrs) {
    AttributeGaps g;
    g.attribute = a;
    g.parity_gap = statistical_parity_report(scored, a).max_gap;
    const auto eo = equalized_odds_report(scored, a);
    g.fpr_gap = eo.fpr_gap;
    g.fnr_gap = eo.fnr_gap;
    r.gaps.push_back(std::move(g));
  }
  return r;
}

struct TrainingResult {
  ConstrainedModel model;
  TrainingReport report;
};

// Gradient descent from zero with backtracking (Armijo) step control. The
// path depends only on the inputs, so runs are bit-reproducible.
inline TrainingResult train(const Dataset& d, const std::vector<PairConstraint>& constraints,
                            const TrainingConfig& config) {
  const Objective obj(d, constraints, config);
  std::vector<double> theta(obj.size(), 0.0), next(obj.size());
  double f = obj.value(theta);
  if (!std::isfinite(f)) throw NonFinite("objective is not finite at the starting point");

  Convergence conv;
  double step = 1.0;
  auto g = obj.gradient(theta);
  auto norm = [](const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
  };
  double gn = norm(g);
  while (conv.iterations < config.max_iterations && gn > config.tolerance) {
    if (!std::isfinite(gn)) throw NonFinite("gradient is not finite");
    step = std::min(step * 2.0, 1e6);
    double fn = 0.0;
    for (;;) {
      for (std::size_t k = 0; k < theta.size(); ++k) next[k] = theta[k] - step * g[k];
      fn = obj.value(next);
      if (std::isfinite(fn) && fn <= f - 1e-4 * step * gn * gn) break;
      step *= 0.5;
      if (step < 1e-300) break;
    }
    if (step < 1e-300) break;  // no further decrease representable
    theta.swap(next);
    f = fn;
    g = obj.gradient(theta);
    gn = norm(g);
    ++conv.iterations;
  }
  for (double v : theta)
    if (!std::isfinite(v)) throw NonFinite("training diverged");
  conv.gradient_norm = gn;
  conv.converged = gn <= config.tolerance;

  TrainingResult out;
  out.model.schema = d.schema;
  out.model.coordinate_names = obj.encoder().coordinate_names();
  out.model.coefficients.assign(theta.begin(), theta.end() - 1);
  out.model.intercept = theta.back();
  out.model.threshold = d.threshold;
  out.model.config = config;
  out.report = evaluate(out.model, d, constraints);
  out.report.convergence = conv;
  return out;
}

// ---------------------------------------------------------------------------
// Serialization

inline json to_json(const PairConstraint& c) {
  json j;
  j["kind"] = to_string(c.kind);
  if (c.kind == ConstraintKind::strict) {
    j["hi"] = c.hi;
    j["lo"] = c.lo;
  } else {
    j["a"] = c.a;
    j["b"] = c.b;
  }
  j["margin"] = c.margin;
  j["weight"] = c.weight;
  return j;
}

inline json to_json(const TrainingConfig& c) {
  json j;
  j["lambda_pair"] = c.lambda_pair;
  j["lambda_parity"] = c.lambda_parity;
  j["lambda_odds"] = c.lambda_odds;
  j["margin"] = c.margin;
  j["l2"] = c.l2;
  j["excluded_attributes"] = c.excluded_attributes;
  j["fairness_attributes"] = c.fairness_attributes;
  j["seed"] = c.seed;
  j["max_iterations"] = c.max_iterations;
  j["tolerance"] = c.tolerance;
  return j;
}

inline TrainingConfig training_config_from_json(const json& j) {
  TrainingConfig c;
  try {
    c.lambda_pair = j.value("lambda_pair", c.lambda_pair);
    c.lambda_parity = j.value("lambda_parity", c.lambda_parity);
    c.lambda_odds = j.value("lambda_odds", c.lambda_odds);
    c.margin = j.value("margin", c.margin);
    c.l2 = j.value("l2", c.l2);
    if (j.contains("excluded_attributes"))
      c.excluded_attributes = j.at("excluded_attributes").get<std::set<std::string>>();
    if (j.contains("fairness_attributes"))
      c.fairness_attributes = j.at("fairness_attributes").get<std::vector<std::string>>();
    c.seed = j.value("seed", c.seed);
    c.max_iterations = j.value("max_iterations", c.max_iterations);
    c.tolerance = j.value("tolerance", c.tolerance);
  } catch (const json::exception& e) {
    throw ValidationError(std::string("config: ") + e.what());
  }
  return c;
}

inline json to_json(const ConstrainedModel& m) {
  json j;
  j["format"] = "fairlicit-model";
  j["version"] = 1;
  j["threshold"] = m.threshold;
  j["intercept"] = m.intercept;
  j["coefficients"] = json::object();
  for (std::size_t k = 0; k < m.coefficients.size(); ++k) j["coefficients"][m.coordinate_names[k]] = m.coefficients[k];
  j["config"] = to_json(m.config);
  j["schema"] = to_json(m.schema);
  return j;
}

inline ConstrainedModel model_from_json(const json& j) {
  ConstrainedModel m;
  try {
    if (j.at("format") != "fairlicit-model") throw ValidationError("not a model file");
    m.schema = schema_from_json(j.at("schema"));
    m.config = training_config_from_json(j.at("config"));
    m.threshold = j.at("threshold").get<double>();
    m.intercept = j.at("intercept").get<double>();
    m.coordinate_names = m.encoder().coordinate_names();
    const auto& co = j.at("coefficients");
    if (co.size() != m.coordinate_names.size()) throw ValidationError("model: coefficient count mismatch");
    for (const auto& name : m.coordinate_names) m.coefficients.push_back(co.at(name).get<double>());
  } catch (const json::exception& e) {
    throw ValidationError(std::string("model: ") + e.what());
  }
  return m;
}

inline std::string serialize(const ConstrainedModel& m) { return to_json(m).dump(2) + "\n"; }

inline json to_json(const TrainingReport& r) {
  json j;
  j["objective"] = r.objective;
  j["terms"] = {{"cross_entropy", r.terms.cross_entropy}, {"l2", r.terms.l2},
                {"pair_strict", r.terms.pair_strict},     {"pair_equal", r.terms.pair_equal},
                {"parity", r.terms.parity},               {"odds", r.terms.odds}};
  j["strict_constraints"] = r.strict_constraints;
  j["strict_satisfied"] = r.strict_satisfied;
  j["satisfied_fraction"] = rate_json(r.satisfied_fraction);
  j["equal_constraints"] = r.equal_constraints;
  j["gaps"] = json::array();
  for (const auto& g : r.gaps)
    j["gaps"].push_back({{"attribute", g.attribute},
                         {"parity_gap", rate_json(g.parity_gap)},
                         {"fpr_gap", rate_json(g.fpr_gap)},
                         {"fnr_gap", rate_json(g.fnr_gap)}});
  if (r.convergence)
    j["convergence"] = {{"iterations", r.convergence->iterations},
                        {"gradient_norm", r.convergence->gradient_norm},
                        {"converged", r.convergence->converged}};
  else
    j["convergence"] = nullptr;
  return j;
}

inline std::string render_text(const TrainingReport& r) {
  std::string out;
  auto line = [&](std::string k, std::string v) { out += detail::pad(std::move(k), 22) + v + "\n"; };
  line("objective", format_fixed(r.objective, 6));
  line("  cross_entropy", format_fixed(r.terms.cross_entropy, 6));
  line("  l2", format_fixed(r.terms.l2, 6));
  line("  pair_strict", format_fixed(r.terms.pair_strict, 6));
  line("  pair_equal", format_fixed(r.terms.pair_equal, 6));
  line("  parity", format_fixed(r.terms.parity, 6));
  line("  odds", format_fixed(r.terms.odds, 6));
  line("strict satisfied", std::to_string(r.strict_satisfied) + "/" + std::to_string(r.strict_constraints));
  line("equal constraints", std::to_string(r.equal_constraints));
  out += "attribute             parity_gap  fpr_gap  fnr_gap\n";
  for (const auto& g : r.gaps)
    out += detail::pad(g.attribute, 22) + detail::pad(detail::cell(g.parity_gap), 12) +
           detail::pad(detail::cell(g.fpr_gap), 9) + detail::cell(g.fnr_gap) + "\n";
  if (r.convergence)
    line("iterations", std::to_string(r.convergence->iterations) + (r.convergence->converged ? " (converged)" : ""));
  return out;
}

}  // namespace fairlicit

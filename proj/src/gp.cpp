#include "acrosense/gp.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

namespace acrosense::gp {

double sigmoid(double x) {
    if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
    const double e = std::exp(x);
    return e / (1.0 + e);
}

double log_sigmoid(double x) {
    if (x >= 0.0) return -std::log1p(std::exp(-x));
    return x - std::log1p(std::exp(x));
}

GaussHermite gauss_hermite(int n) {
    if (n < 1) throw ValidationError("gauss_hermite: n must be >= 1");
    Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i + 1 < n; ++i) {
        const double b = std::sqrt((i + 1) / 2.0);
        jacobi(i, i + 1) = b;
        jacobi(i + 1, i) = b;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(jacobi);
    if (es.info() != Eigen::Success) throw NumericError("gauss_hermite: eigensolve failed");
    GaussHermite gh;
    gh.nodes = es.eigenvalues();
    gh.weights.resize(n);
    const double sqrt_pi = std::sqrt(M_PI);
    for (int i = 0; i < n; ++i) {
        const double v0 = es.eigenvectors()(0, i);
        gh.weights(i) = sqrt_pi * v0 * v0;
    }
    return gh;
}

namespace {

constexpr int kQuadratureNodes = 33;

const GaussHermite& quadrature() {
    static const GaussHermite gh = gauss_hermite(kQuadratureNodes);
    return gh;
}

struct NewtonStep {
    Eigen::VectorXd a;
    Eigen::VectorXd f;
    double psi;
};

double objective(const Eigen::VectorXd& a, const Eigen::VectorXd& f,
                 const Eigen::VectorXi& y) {
    double logp = 0.0;
    for (Eigen::Index i = 0; i < f.size(); ++i) logp += log_sigmoid(y(i) * f(i));
    return -0.5 * a.dot(f) + logp;
}

}  // namespace

LaplaceState laplace_fit_binary(const Eigen::MatrixXd& k_in, const Eigen::VectorXi& y,
                                double tol, int max_newton) {
    const Eigen::Index n = k_in.rows();
    if (n < 2 || k_in.cols() != n) {
        throw ValidationError("laplace_fit_binary: K must be square with n >= 2");
    }
    if (y.size() != n) throw ValidationError("laplace_fit_binary: label length mismatch");
    bool has_pos = false, has_neg = false;
    for (Eigen::Index i = 0; i < n; ++i) {
        if (y(i) == 1) {
            has_pos = true;
        } else if (y(i) == -1) {
            has_neg = true;
        } else {
            throw ValidationError("laplace_fit_binary: labels must be +-1");
        }
    }
    if (!has_pos || !has_neg) {
        throw ValidationError("laplace_fit_binary: both classes must be present");
    }

    Eigen::VectorXd t(n);
    for (Eigen::Index i = 0; i < n; ++i) t(i) = (y(i) + 1) / 2;

    Eigen::MatrixXd k = k_in;  // local copy only mutated on jitter escalation
    bool escalated = false;

    for (;;) {
        NewtonStep cur{Eigen::VectorXd::Zero(n), Eigen::VectorXd::Zero(n), 0.0};
        cur.psi = objective(cur.a, cur.f, y);

        Eigen::VectorXd pi(n), sqrt_w(n);
        Eigen::MatrixXd chol_lower;
        bool converged = false;
        bool chol_failed = false;
        std::vector<double> trace;
        trace.push_back(cur.psi);

        for (int iter = 0; iter < max_newton && !converged && !chol_failed; ++iter) {
            for (Eigen::Index i = 0; i < n; ++i) {
                pi(i) = sigmoid(cur.f(i));
                sqrt_w(i) = std::sqrt(std::max(0.0, pi(i) * (1.0 - pi(i))));
            }
            Eigen::MatrixXd b_mat =
                sqrt_w.asDiagonal() * k * sqrt_w.asDiagonal();
            b_mat.diagonal().array() += 1.0;
            Eigen::LLT<Eigen::MatrixXd> llt(b_mat);
            if (llt.info() != Eigen::Success) {
                chol_failed = true;
                break;
            }
            chol_lower = llt.matrixL();

            const Eigen::VectorXd w = sqrt_w.array().square();
            const Eigen::VectorXd b = w.cwiseProduct(cur.f) + (t - pi);
            const Eigen::VectorXd kb = k * b;
            const Eigen::VectorXd inner =
                chol_lower.triangularView<Eigen::Lower>().solve(
                    sqrt_w.cwiseProduct(kb));
            const Eigen::VectorXd outer =
                chol_lower.transpose().triangularView<Eigen::Upper>().solve(inner);
            NewtonStep next;
            next.a = b - sqrt_w.cwiseProduct(outer);
            next.f = k * next.a;
            next.psi = objective(next.a, next.f, y);

            // Accept the full step unless it decreases the objective beyond
            // floating-point noise; otherwise backtrack along the segment
            // between the iterates (linear in the dual, so f stays K a).
            const double noise = 1e-12 * (1.0 + std::abs(cur.psi));
            if (next.psi < cur.psi - noise) {
                double s = 0.5;
                bool improved = false;
                for (int halvings = 0; halvings < 40; ++halvings, s *= 0.5) {
                    NewtonStep mid;
                    mid.a = cur.a + s * (next.a - cur.a);
                    mid.f = cur.f + s * (next.f - cur.f);
                    mid.psi = objective(mid.a, mid.f, y);
                    if (mid.psi > cur.psi) {
                        next = std::move(mid);
                        improved = true;
                        break;
                    }
                }
                if (!improved) {
                    converged = true;  // no ascent direction left at this scale
                    break;
                }
            }

            const double delta = next.psi - cur.psi;
            cur = std::move(next);
            trace.push_back(cur.psi);

            // Stationarity: grad = (t - sigmoid(f)) - a.
            double grad_inf = 0.0;
            for (Eigen::Index i = 0; i < n; ++i) {
                grad_inf = std::max(grad_inf, std::abs(t(i) - sigmoid(cur.f(i)) - cur.a(i)));
            }
            if (delta < tol && grad_inf < 1e-9) converged = true;
        }

        if (chol_failed) {
            if (escalated) {
                throw NumericError("laplace_fit_binary: Cholesky failed after jitter escalation");
            }
            escalated = true;
            k.diagonal().array() += 1e-6;
            continue;
        }
        if (!converged) {
            std::ostringstream msg;
            msg << "laplace_fit_binary: no convergence after " << max_newton
                << " iterations; objective trace:";
            const std::size_t head = std::min<std::size_t>(3, trace.size());
            for (std::size_t i = 0; i < head; ++i) msg << ' ' << trace[i];
            if (trace.size() > 6) msg << " ...";
            for (std::size_t i = std::max(head, trace.size() - 3); i < trace.size(); ++i) {
                msg << ' ' << trace[i];
            }
            throw NumericError(msg.str());
        }

        // Refresh the cached quantities at the accepted mode.
        LaplaceState state;
        state.mode = cur.f;
        state.dual = cur.a;
        state.grad.resize(n);
        state.sqrt_w.resize(n);
        for (Eigen::Index i = 0; i < n; ++i) {
            const double p = sigmoid(cur.f(i));
            state.grad(i) = t(i) - p;
            state.sqrt_w(i) = std::sqrt(std::max(0.0, p * (1.0 - p)));
        }
        Eigen::MatrixXd b_mat =
            state.sqrt_w.asDiagonal() * k * state.sqrt_w.asDiagonal();
        b_mat.diagonal().array() += 1.0;
        Eigen::LLT<Eigen::MatrixXd> llt(b_mat);
        if (llt.info() != Eigen::Success) {
            throw NumericError("laplace_fit_binary: Cholesky failed at the mode");
        }
        state.chol_lower = llt.matrixL();
        double log_det_half = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) log_det_half += std::log(state.chol_lower(i, i));
        state.log_marginal_likelihood = cur.psi - log_det_half;
        return state;
    }
}

double predictive_probability(double mean, double var) {
    const auto& gh = quadrature();
    const double scale = std::sqrt(2.0 * std::max(var, 1e-12));
    double acc = 0.0;
    for (int i = 0; i < gh.nodes.size(); ++i) {
        acc += gh.weights(i) * sigmoid(scale * gh.nodes(i) + mean);
    }
    return acc / std::sqrt(M_PI);
}

Eigen::MatrixXd predict_probability_matrix(const std::vector<LaplaceState>& states,
                                           const Eigen::MatrixXd& k_cross,
                                           double diag_value) {
    const Eigen::Index m = k_cross.cols();
    const auto n_labels = static_cast<Eigen::Index>(states.size());
    Eigen::MatrixXd probs(m, n_labels);
    for (Eigen::Index l = 0; l < n_labels; ++l) {
        const LaplaceState& st = states[static_cast<std::size_t>(l)];
        const Eigen::VectorXd mean = k_cross.transpose() * st.grad;
        const Eigen::MatrixXd v = st.chol_lower.triangularView<Eigen::Lower>().solve(
            st.sqrt_w.asDiagonal() * k_cross);
        for (Eigen::Index j = 0; j < m; ++j) {
            const double var = std::max(diag_value - v.col(j).squaredNorm(), 1e-12);
            probs(j, l) = predictive_probability(mean(j), var);
        }
    }
    for (Eigen::Index j = 0; j < m; ++j) {
        const double total = probs.row(j).sum();
        if (total > 0.0) probs.row(j) /= total;
    }
    return probs;
}

double TrainedModel::summed_lml() const {
    double s = 0.0;
    for (const auto& st : states) s += st.log_marginal_likelihood;
    return s;
}

namespace {

// Hyperparameters in tree pre-order; used by the marginal-likelihood climb.
void collect_params(const kernels::KernelSpec& spec, std::vector<double>& out) {
    using Kind = kernels::KernelNode::Kind;
    switch (spec->kind) {
        case Kind::kConstant:
            out.push_back(spec->value);
            break;
        case Kind::kRbf:
            out.push_back(spec->length_scale);
            break;
        case Kind::kMatern:
            out.push_back(spec->length_scale);  // nu is structural, not tuned
            break;
        case Kind::kRationalQuadratic:
            out.push_back(spec->length_scale);
            out.push_back(spec->alpha);
            break;
        case Kind::kSum:
        case Kind::kProduct:
            collect_params(spec->left, out);
            collect_params(spec->right, out);
            break;
    }
}

kernels::KernelSpec rebuild_with_params(const kernels::KernelSpec& spec,
                                        const std::vector<double>& params,
                                        std::size_t& idx) {
    using Kind = kernels::KernelNode::Kind;
    switch (spec->kind) {
        case Kind::kConstant:
            return kernels::constant(params.at(idx++));
        case Kind::kRbf:
            return kernels::rbf(params.at(idx++));
        case Kind::kMatern: {
            const double l = params.at(idx++);
            return kernels::matern(l, spec->nu);
        }
        case Kind::kRationalQuadratic: {
            const double l = params.at(idx++);
            const double a = params.at(idx++);
            return kernels::rational_quadratic(l, a);
        }
        case Kind::kSum: {
            auto left = rebuild_with_params(spec->left, params, idx);
            auto right = rebuild_with_params(spec->right, params, idx);
            return kernels::sum(std::move(left), std::move(right));
        }
        case Kind::kProduct: {
            auto left = rebuild_with_params(spec->left, params, idx);
            auto right = rebuild_with_params(spec->right, params, idx);
            return kernels::product(std::move(left), std::move(right));
        }
    }
    throw ValidationError("rebuild_with_params: corrupt kernel node");
}

kernels::KernelSpec with_params(const kernels::KernelSpec& spec,
                                const std::vector<double>& params) {
    std::size_t idx = 0;
    auto out = rebuild_with_params(spec, params, idx);
    if (idx != params.size()) throw ValidationError("with_params: arity mismatch");
    return out;
}

std::vector<LaplaceState> fit_all_labels(const Eigen::MatrixXd& k,
                                         const std::vector<std::string>& label_order,
                                         const std::vector<std::string>& row_labels,
                                         double tol, int max_newton) {
    const Eigen::Index n = k.rows();
    std::vector<LaplaceState> states(label_order.size());
    std::vector<std::string> errors(label_order.size());
    parallel::parallel_for(label_order.size(), [&](std::size_t l) {
        try {
            Eigen::VectorXi y(n);
            for (Eigen::Index i = 0; i < n; ++i) {
                y(i) = row_labels[static_cast<std::size_t>(i)] == label_order[l] ? 1 : -1;
            }
            states[l] = laplace_fit_binary(k, y, tol, max_newton);
        } catch (const std::exception& e) {
            errors[l] = "label '" + label_order[l] + "': " + e.what();
        }
    });
    for (const auto& e : errors) {
        if (!e.empty()) throw NumericError(e);
    }
    return states;
}

}  // namespace

TrainedModel fit(const prep::FeatureMatrix& features, const kernels::KernelSpec& kernel,
                 const FitOptions& options) {
    const auto labels = features.label_set();
    if (labels.size() < 2) throw ValidationError("fit: need at least 2 labels");
    {
        std::map<std::string, int> counts;
        for (const auto& m : features.row_meta) ++counts[m.label];
        for (const auto& [label, c] : counts) {
            if (c < 2) {
                throw ValidationError("fit: label '" + label + "' has fewer than 2 rows");
            }
        }
    }

    std::vector<std::string> row_labels;
    row_labels.reserve(features.rows());
    for (const auto& m : features.row_meta) row_labels.push_back(m.label);

    const Eigen::MatrixXd d2 = kernels::pairwise_sqdist_self(features.values);
    auto build_k = [&](const kernels::KernelSpec& spec) {
        Eigen::MatrixXd k = kernels::eval_from_sqdist(spec, d2);
        k.diagonal().array() += options.jitter;
        return k;
    };

    kernels::KernelSpec active = kernel;
    auto evaluate = [&](const kernels::KernelSpec& spec) {
        auto states = fit_all_labels(build_k(spec), labels, row_labels, options.tol,
                                     options.max_newton);
        double s = 0.0;
        for (const auto& st : states) s += st.log_marginal_likelihood;
        return std::make_pair(s, std::move(states));
    };

    auto [best_lml, states] = evaluate(active);

    if (options.optimize_lml) {
        std::vector<double> params;
        collect_params(active, params);
        std::vector<double> theta(params.size());
        for (std::size_t i = 0; i < params.size(); ++i) theta[i] = std::log(params[i]);

        const double h = 1e-4;
        for (int iter = 0; iter < 50; ++iter) {
            std::vector<double> grad(theta.size());
            double grad_norm = 0.0;
            for (std::size_t p = 0; p < theta.size(); ++p) {
                auto bumped = theta;
                bumped[p] += h;
                std::vector<double> raw(bumped.size());
                for (std::size_t i = 0; i < bumped.size(); ++i) raw[i] = std::exp(bumped[i]);
                const double lml = evaluate(with_params(active, raw)).first;
                grad[p] = (lml - best_lml) / h;
                grad_norm = std::max(grad_norm, std::abs(grad[p]));
            }
            if (grad_norm < 1e-6) break;

            bool accepted = false;
            for (double step = 1.0; step >= 1e-6; step *= 0.5) {
                auto cand_theta = theta;
                for (std::size_t p = 0; p < theta.size(); ++p) {
                    cand_theta[p] += step * grad[p] / grad_norm;
                }
                std::vector<double> raw(cand_theta.size());
                for (std::size_t i = 0; i < cand_theta.size(); ++i) {
                    raw[i] = std::exp(cand_theta[i]);
                }
                auto cand_spec = with_params(active, raw);
                auto [cand_lml, cand_states] = evaluate(cand_spec);
                if (cand_lml > best_lml) {
                    theta = std::move(cand_theta);
                    active = std::move(cand_spec);
                    best_lml = cand_lml;
                    states = std::move(cand_states);
                    accepted = true;
                    break;
                }
            }
            if (!accepted) break;
        }
    }

    TrainedModel model;
    model.kernel = active;
    model.label_order = labels;
    model.states = std::move(states);
    model.train_features = features.values;
    model.norm_stats = features.norm_stats;
    model.feature_layout = features.feature_layout;
    model.jitter = options.jitter;
    return model;
}

Eigen::MatrixXd predict_proba(const TrainedModel& model, const Eigen::MatrixXd& x) {
    if (x.cols() != model.train_features.cols()) {
        throw ValidationError("predict_proba: feature dimension mismatch");
    }
    const Eigen::MatrixXd k_cross = kernels::eval_from_sqdist(
        model.kernel, kernels::pairwise_sqdist(model.train_features, x));
    const double diag = kernels::diagonal_value(model.kernel) + model.jitter;
    return predict_probability_matrix(model.states, k_cross, diag);
}

Eigen::MatrixXd predict_proba(const TrainedModel& model, const prep::FeatureMatrix& fm) {
    if (prep::norm_stats_hash(fm.norm_stats) != prep::norm_stats_hash(model.norm_stats)) {
        throw ValidationError(
            "predict_proba: feature normalization statistics do not match the model");
    }
    return predict_proba(model, fm.values);
}

std::vector<std::string> predict_labels(const TrainedModel& model,
                                        const Eigen::MatrixXd& x) {
    const Eigen::MatrixXd probs = predict_proba(model, x);
    std::vector<std::string> out;
    out.reserve(static_cast<std::size_t>(probs.rows()));
    for (Eigen::Index j = 0; j < probs.rows(); ++j) {
        Eigen::Index best = 0;
        for (Eigen::Index l = 1; l < probs.cols(); ++l) {
            if (probs(j, l) > probs(j, best)) best = l;  // ties keep label_order position
        }
        out.push_back(model.label_order[static_cast<std::size_t>(best)]);
    }
    return out;
}

double accuracy(const TrainedModel& model, const prep::FeatureMatrix& fm) {
    const auto predicted = predict_labels(model, fm.values);
    std::size_t hits = 0;
    for (std::size_t i = 0; i < predicted.size(); ++i) {
        if (predicted[i] == fm.row_meta[i].label) ++hits;
    }
    return fm.rows() == 0 ? 0.0 : static_cast<double>(hits) / static_cast<double>(fm.rows());
}

// ---------------------------------------------------------------------------
// Model container "ACM1"

namespace {

void put_f64(std::string& out, double v) {
    out.append(reinterpret_cast<const char*>(&v), sizeof(double));
}

void put_vector(std::string& out, const Eigen::VectorXd& v) {
    for (Eigen::Index i = 0; i < v.size(); ++i) put_f64(out, v(i));
}

void put_lower_packed(std::string& out, const Eigen::MatrixXd& lower) {
    for (Eigen::Index i = 0; i < lower.rows(); ++i) {
        for (Eigen::Index j = 0; j <= i; ++j) put_f64(out, lower(i, j));
    }
}

class ByteReader {
public:
    ByteReader(const char* data, std::size_t len) : data_(data), len_(len) {}

    double f64() {
        if (pos_ + sizeof(double) > len_) throw ValidationError("model file truncated");
        double v;
        std::memcpy(&v, data_ + pos_, sizeof(double));
        pos_ += sizeof(double);
        return v;
    }

    Eigen::VectorXd vector(Eigen::Index n) {
        Eigen::VectorXd v(n);
        for (Eigen::Index i = 0; i < n; ++i) v(i) = f64();
        return v;
    }

    Eigen::MatrixXd lower_packed(Eigen::Index n) {
        Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
        for (Eigen::Index i = 0; i < n; ++i) {
            for (Eigen::Index j = 0; j <= i; ++j) m(i, j) = f64();
        }
        return m;
    }

private:
    const char* data_;
    std::size_t len_;
    std::size_t pos_ = 0;
};

}  // namespace

std::string serialize_model(const TrainedModel& model) {
    nlohmann::ordered_json header;
    header["kernel"] = nlohmann::ordered_json::parse(kernels::to_json(model.kernel));
    header["kernel_expression"] = kernels::print(model.kernel);
    header["label_order"] = model.label_order;
    header["norm_stats"] = nlohmann::ordered_json::array();
    for (const auto& s : model.norm_stats) {
        header["norm_stats"].push_back({{"mean", s.mean},
                                        {"stddev", s.stddev},
                                        {"zero_variance", s.zero_variance}});
    }
    header["feature_layout"] = {{"kind", model.feature_layout.kind},
                                {"block_size", model.feature_layout.block_size},
                                {"channels", model.feature_layout.channels},
                                {"detrend", model.feature_layout.detrend},
                                {"normalization", model.feature_layout.normalization}};
    header["jitter"] = model.jitter;
    header["rows"] = model.train_features.rows();
    header["cols"] = model.train_features.cols();
    nlohmann::ordered_json lmls = nlohmann::ordered_json::array();
    for (const auto& st : model.states) lmls.push_back(st.log_marginal_likelihood);
    header["log_marginal_likelihood"] = lmls;
    const std::string header_text = header.dump();

    std::string out;
    out.append("ACM1", 4);
    const std::uint32_t version = 1;
    out.append(reinterpret_cast<const char*>(&version), 4);
    const auto hlen = static_cast<std::uint64_t>(header_text.size());
    out.append(reinterpret_cast<const char*>(&hlen), 8);
    out.append(header_text);

    for (Eigen::Index r = 0; r < model.train_features.rows(); ++r) {
        for (Eigen::Index c = 0; c < model.train_features.cols(); ++c) {
            put_f64(out, model.train_features(r, c));
        }
    }
    for (const auto& st : model.states) {
        put_vector(out, st.mode);
        put_vector(out, st.sqrt_w);
        put_vector(out, st.dual);
        put_vector(out, st.grad);
        put_lower_packed(out, st.chol_lower);
    }
    return out;
}

void save_model(const TrainedModel& model, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ValidationError("cannot write " + path.string());
    const std::string bytes = serialize_model(model);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

TrainedModel load_model(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot open " + path.string());
    std::string bytes((std::istreambuf_iterator<char>(in)),
                      std::istreambuf_iterator<char>());
    if (bytes.size() < 16 || bytes.compare(0, 4, "ACM1") != 0) {
        throw ValidationError("not a model container (bad magic): " + path.string());
    }
    std::uint32_t version;
    std::memcpy(&version, bytes.data() + 4, 4);
    if (version != 1) {
        throw ValidationError("unsupported model version " + std::to_string(version));
    }
    std::uint64_t hlen;
    std::memcpy(&hlen, bytes.data() + 8, 8);
    if (16 + hlen > bytes.size()) throw ValidationError("model header truncated");
    nlohmann::json header;
    try {
        header = nlohmann::json::parse(bytes.substr(16, hlen));
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("model header unparsable: ") + e.what());
    }

    TrainedModel model;
    model.kernel = kernels::from_json(header.at("kernel").dump());
    model.label_order = header.at("label_order").get<std::vector<std::string>>();
    for (const auto& s : header.at("norm_stats")) {
        model.norm_stats.push_back({s.at("mean").get<double>(),
                                    s.at("stddev").get<double>(),
                                    s.at("zero_variance").get<bool>()});
    }
    const auto& fl = header.at("feature_layout");
    model.feature_layout.kind = fl.at("kind").get<std::string>();
    model.feature_layout.block_size = fl.at("block_size").get<int>();
    model.feature_layout.channels = fl.at("channels").get<std::vector<int>>();
    model.feature_layout.detrend = fl.at("detrend").get<std::string>();
    model.feature_layout.normalization = fl.at("normalization").get<std::string>();
    model.jitter = header.at("jitter").get<double>();
    const auto rows = header.at("rows").get<Eigen::Index>();
    const auto cols = header.at("cols").get<Eigen::Index>();
    const auto lmls = header.at("log_marginal_likelihood").get<std::vector<double>>();

    ByteReader reader(bytes.data() + 16 + hlen, bytes.size() - 16 - hlen);
    model.train_features.resize(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r) {
        for (Eigen::Index c = 0; c < cols; ++c) model.train_features(r, c) = reader.f64();
    }
    for (std::size_t l = 0; l < model.label_order.size(); ++l) {
        LaplaceState st;
        st.mode = reader.vector(rows);
        st.sqrt_w = reader.vector(rows);
        st.dual = reader.vector(rows);
        st.grad = reader.vector(rows);
        st.chol_lower = reader.lower_packed(rows);
        st.log_marginal_likelihood = lmls.at(l);
        model.states.push_back(std::move(st));
    }
    return model;
}

}  // namespace acrosense::gp

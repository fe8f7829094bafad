#include "acrosense/kernels.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <sstream>

#include <json.hpp>

namespace acrosense::kernels {

namespace {

void require_positive(double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) {
        throw ValidationError(std::string("kernel hyperparameter ") + name +
                              " must be positive and finite");
    }
}

KernelSpec make_node(KernelNode n) {
    return std::make_shared<const KernelNode>(std::move(n));
}

}  // namespace

KernelSpec constant(double c) {
    require_positive(c, "c");
    KernelNode n;
    n.kind = KernelNode::Kind::kConstant;
    n.value = c;
    return make_node(n);
}

KernelSpec rbf(double length_scale) {
    require_positive(length_scale, "l");
    KernelNode n;
    n.kind = KernelNode::Kind::kRbf;
    n.length_scale = length_scale;
    return make_node(n);
}

KernelSpec matern(double length_scale, double nu) {
    require_positive(length_scale, "l");
    if (nu != 0.5 && nu != 1.5 && nu != 2.5) {
        throw ValidationError("Matern nu must be one of {0.5, 1.5, 2.5}");
    }
    KernelNode n;
    n.kind = KernelNode::Kind::kMatern;
    n.length_scale = length_scale;
    n.nu = nu;
    return make_node(n);
}

KernelSpec rational_quadratic(double length_scale, double alpha) {
    require_positive(length_scale, "l");
    require_positive(alpha, "a");
    KernelNode n;
    n.kind = KernelNode::Kind::kRationalQuadratic;
    n.length_scale = length_scale;
    n.alpha = alpha;
    return make_node(n);
}

KernelSpec sum(KernelSpec a, KernelSpec b) {
    if (!a || !b) throw ValidationError("sum: null kernel operand");
    KernelNode n;
    n.kind = KernelNode::Kind::kSum;
    n.left = std::move(a);
    n.right = std::move(b);
    return make_node(n);
}

KernelSpec product(KernelSpec a, KernelSpec b) {
    if (!a || !b) throw ValidationError("product: null kernel operand");
    KernelNode n;
    n.kind = KernelNode::Kind::kProduct;
    n.left = std::move(a);
    n.right = std::move(b);
    return make_node(n);
}

// ---------------------------------------------------------------------------
// Expression grammar
//
//   expr    := term (('+') term)*
//   term    := factor (('*') factor)*
//   factor  := primitive | '(' expr ')'
//   primitive := C '(' number ')'
//              | RBF '(' 'l' '=' number ')'
//              | M '(' 'l' '=' number ',' 'nu' '=' number ')'
//              | RQ '(' 'l' '=' number ',' 'a' '=' number ')'

namespace {

class Parser {
public:
    explicit Parser(const std::string& text) : text_(text) {}

    KernelSpec run() {
        auto spec = parse_expr();
        skip_ws();
        if (pos_ != text_.size()) fail("unexpected trailing input");
        return spec;
    }

private:
    [[noreturn]] void fail(const std::string& why) const {
        throw ValidationError("kernel expression error at offset " +
                              std::to_string(pos_) + ": " + why);
    }

    void skip_ws() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) {
            ++pos_;
        }
    }

    bool eat(char c) {
        skip_ws();
        if (pos_ < text_.size() && text_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    void expect(char c) {
        if (!eat(c)) fail(std::string("expected '") + c + "'");
    }

    std::string ident() {
        skip_ws();
        std::size_t start = pos_;
        while (pos_ < text_.size() &&
               (std::isalpha(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
            ++pos_;
        }
        if (pos_ == start) fail("expected identifier");
        return text_.substr(start, pos_ - start);
    }

    double number() {
        skip_ws();
        const char* begin = text_.c_str() + pos_;
        char* end = nullptr;
        const double v = std::strtod(begin, &end);
        if (end == begin) fail("expected number");
        pos_ += static_cast<std::size_t>(end - begin);
        return v;
    }

    double named_number(const std::string& want) {
        const std::string name = ident();
        if (name != want) fail("expected parameter '" + want + "', got '" + name + "'");
        expect('=');
        return number();
    }

    KernelSpec parse_primitive() {
        const std::string name = ident();
        expect('(');
        KernelSpec spec;
        if (name == "C") {
            spec = constant(number());
        } else if (name == "RBF") {
            spec = rbf(named_number("l"));
        } else if (name == "M") {
            const double l = named_number("l");
            expect(',');
            const double nu = named_number("nu");
            spec = matern(l, nu);
        } else if (name == "RQ") {
            const double l = named_number("l");
            expect(',');
            const double a = named_number("a");
            spec = rational_quadratic(l, a);
        } else {
            fail("unknown kernel '" + name + "'");
        }
        expect(')');
        return spec;
    }

    KernelSpec parse_factor() {
        if (eat('(')) {
            auto spec = parse_expr();
            expect(')');
            return spec;
        }
        return parse_primitive();
    }

    KernelSpec parse_term() {
        auto lhs = parse_factor();
        while (eat('*')) lhs = product(lhs, parse_factor());
        return lhs;
    }

    KernelSpec parse_expr() {
        auto lhs = parse_term();
        while (eat('+')) lhs = sum(lhs, parse_term());
        return lhs;
    }

    const std::string& text_;
    std::size_t pos_ = 0;
};

std::string fmt_param(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void print_rec(const KernelSpec& spec, std::ostream& out, bool parent_is_product) {
    switch (spec->kind) {
        case KernelNode::Kind::kConstant:
            out << "C(" << fmt_param(spec->value) << ")";
            break;
        case KernelNode::Kind::kRbf:
            out << "RBF(l=" << fmt_param(spec->length_scale) << ")";
            break;
        case KernelNode::Kind::kMatern:
            out << "M(l=" << fmt_param(spec->length_scale)
                << ",nu=" << fmt_param(spec->nu) << ")";
            break;
        case KernelNode::Kind::kRationalQuadratic:
            out << "RQ(l=" << fmt_param(spec->length_scale)
                << ",a=" << fmt_param(spec->alpha) << ")";
            break;
        case KernelNode::Kind::kSum:
            if (parent_is_product) out << "(";
            print_rec(spec->left, out, false);
            out << "+";
            print_rec(spec->right, out, false);
            if (parent_is_product) out << ")";
            break;
        case KernelNode::Kind::kProduct:
            print_rec(spec->left, out, true);
            out << "*";
            print_rec(spec->right, out, true);
            break;
    }
}

}  // namespace

KernelSpec parse(const std::string& expression) { return Parser(expression).run(); }

std::string print(const KernelSpec& spec) {
    if (!spec) throw ValidationError("print: null kernel");
    std::ostringstream out;
    print_rec(spec, out, false);
    return out.str();
}

bool equal(const KernelSpec& a, const KernelSpec& b) {
    if (!a || !b) return a == b;
    if (a->kind != b->kind) return false;
    switch (a->kind) {
        case KernelNode::Kind::kConstant:
            return a->value == b->value;
        case KernelNode::Kind::kRbf:
            return a->length_scale == b->length_scale;
        case KernelNode::Kind::kMatern:
            return a->length_scale == b->length_scale && a->nu == b->nu;
        case KernelNode::Kind::kRationalQuadratic:
            return a->length_scale == b->length_scale && a->alpha == b->alpha;
        case KernelNode::Kind::kSum:
        case KernelNode::Kind::kProduct:
            return equal(a->left, b->left) && equal(a->right, b->right);
    }
    return false;
}

namespace {

nlohmann::ordered_json to_json_rec(const KernelSpec& spec) {
    nlohmann::ordered_json j;
    switch (spec->kind) {
        case KernelNode::Kind::kConstant:
            j["kind"] = "constant";
            j["c"] = spec->value;
            break;
        case KernelNode::Kind::kRbf:
            j["kind"] = "rbf";
            j["l"] = spec->length_scale;
            break;
        case KernelNode::Kind::kMatern:
            j["kind"] = "matern";
            j["l"] = spec->length_scale;
            j["nu"] = spec->nu;
            break;
        case KernelNode::Kind::kRationalQuadratic:
            j["kind"] = "rational_quadratic";
            j["l"] = spec->length_scale;
            j["a"] = spec->alpha;
            break;
        case KernelNode::Kind::kSum:
            j["kind"] = "sum";
            j["left"] = to_json_rec(spec->left);
            j["right"] = to_json_rec(spec->right);
            break;
        case KernelNode::Kind::kProduct:
            j["kind"] = "product";
            j["left"] = to_json_rec(spec->left);
            j["right"] = to_json_rec(spec->right);
            break;
    }
    return j;
}

KernelSpec from_json_rec(const nlohmann::json& j) {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "constant") return constant(j.at("c").get<double>());
    if (kind == "rbf") return rbf(j.at("l").get<double>());
    if (kind == "matern") return matern(j.at("l").get<double>(), j.at("nu").get<double>());
    if (kind == "rational_quadratic") {
        return rational_quadratic(j.at("l").get<double>(), j.at("a").get<double>());
    }
    if (kind == "sum") return sum(from_json_rec(j.at("left")), from_json_rec(j.at("right")));
    if (kind == "product") {
        return product(from_json_rec(j.at("left")), from_json_rec(j.at("right")));
    }
    throw ValidationError("unknown kernel kind in JSON: " + kind);
}

}  // namespace

std::string to_json(const KernelSpec& spec) {
    if (!spec) throw ValidationError("to_json: null kernel");
    return to_json_rec(spec).dump();
}

KernelSpec from_json(const std::string& json_text) {
    try {
        return from_json_rec(nlohmann::json::parse(json_text));
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("kernel JSON unparsable: ") + e.what());
    }
}

Eigen::MatrixXd eval_from_sqdist(const KernelSpec& spec, const Eigen::MatrixXd& d2) {
    if (!spec) throw ValidationError("eval_from_sqdist: null kernel");
    switch (spec->kind) {
        case KernelNode::Kind::kConstant:
            return Eigen::MatrixXd::Constant(d2.rows(), d2.cols(), spec->value);
        case KernelNode::Kind::kRbf: {
            const double inv = 1.0 / (2.0 * spec->length_scale * spec->length_scale);
            return (-d2.array() * inv).exp();
        }
        case KernelNode::Kind::kRationalQuadratic: {
            // (1 + d^2/(2*a*l^2))^(-a) via exp/log1p; stable for huge alpha.
            const double a = spec->alpha;
            const double inv = 1.0 / (2.0 * a * spec->length_scale * spec->length_scale);
            return (d2.array() * inv).unaryExpr(
                [a](double u) { return std::exp(-a * std::log1p(u)); });
        }
        case KernelNode::Kind::kMatern: {
            const double l = spec->length_scale;
            if (spec->nu == 0.5) {
                return d2.array().unaryExpr(
                    [l](double u) { return std::exp(-std::sqrt(u) / l); });
            }
            if (spec->nu == 1.5) {
                const double c = std::sqrt(3.0) / l;
                return d2.array().unaryExpr([c](double u) {
                    const double s = c * std::sqrt(u);
                    return (1.0 + s) * std::exp(-s);
                });
            }
            const double c = std::sqrt(5.0) / l;
            return d2.array().unaryExpr([c](double u) {
                const double s = c * std::sqrt(u);
                return (1.0 + s + s * s / 3.0) * std::exp(-s);
            });
        }
        case KernelNode::Kind::kSum:
            return eval_from_sqdist(spec->left, d2) + eval_from_sqdist(spec->right, d2);
        case KernelNode::Kind::kProduct:
            return eval_from_sqdist(spec->left, d2)
                .cwiseProduct(eval_from_sqdist(spec->right, d2));
    }
    throw ValidationError("eval_from_sqdist: corrupt kernel node");
}

double eval_at_sqdist(const KernelSpec& spec, double d2) {
    Eigen::MatrixXd m(1, 1);
    m(0, 0) = d2;
    return eval_from_sqdist(spec, m)(0, 0);
}

double diagonal_value(const KernelSpec& spec) { return eval_at_sqdist(spec, 0.0); }

Eigen::MatrixXd pairwise_sqdist(const Eigen::MatrixXd& x, const Eigen::MatrixXd& z) {
    if (x.cols() != z.cols()) {
        throw ValidationError("pairwise_sqdist: feature dimension mismatch (" +
                              std::to_string(x.cols()) + " vs " +
                              std::to_string(z.cols()) + ")");
    }
    Eigen::MatrixXd d2 = -2.0 * (x * z.transpose());
    d2.colwise() += x.rowwise().squaredNorm();
    d2.rowwise() += z.rowwise().squaredNorm().transpose();
    return d2.cwiseMax(0.0);
}

Eigen::MatrixXd pairwise_sqdist_self(const Eigen::MatrixXd& x) {
    const Eigen::MatrixXd gram = x * x.transpose();
    const Eigen::Index n = x.rows();
    Eigen::MatrixXd d2(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        d2(i, i) = 0.0;
        for (Eigen::Index j = 0; j < i; ++j) {
            const double v = std::max(0.0, gram(i, i) + gram(j, j) - 2.0 * gram(i, j));
            d2(i, j) = v;
            d2(j, i) = v;
        }
    }
    return d2;
}

Eigen::MatrixXd kernel_eval(const KernelSpec& spec, const Eigen::MatrixXd& x,
                            const Eigen::MatrixXd& z) {
    const bool aliased = x.data() == z.data() && x.rows() == z.rows() &&
                         x.cols() == z.cols();
    return eval_from_sqdist(spec, aliased ? pairwise_sqdist_self(x)
                                          : pairwise_sqdist(x, z));
}

}  // namespace acrosense::kernels

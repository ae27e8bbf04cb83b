#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "szego/expr.hpp"
#include "szego/fock.hpp"
#include "szego/manifold.hpp"

namespace szego {

/// Amplitude a(t) on a chart, real or given as a pair (re, im).
class Amplitude {
public:
    Amplitude() : re_(Expr::number(1.0)) {}
    explicit Amplitude(Expr re, std::optional<Expr> im = std::nullopt) : re_(std::move(re)), im_(std::move(im)) {}

    static Amplitude parse_real(const std::string& text, int dim);
    static Amplitude parse_complex(const std::string& re, const std::string& im, int dim);
    static Amplitude constant(double c) { return Amplitude(Expr::number(c)); }

    bool is_real() const noexcept { return !im_.has_value(); }
    const Expr& re() const noexcept { return re_; }
    const std::optional<Expr>& im() const noexcept { return im_; }

    Complex operator()(std::span<const double> t) const;
    Complex operator()(const Eigen::VectorXd& t) const {
        return (*this)(std::span<const double>(t.data(), static_cast<std::size_t>(t.size())));
    }

    std::string describe() const;

private:
    Expr re_;
    std::optional<Expr> im_;
};

/// Amplitude values at every quadrature node.
std::vector<Complex> evaluate(const Amplitude& a, const std::vector<QuadNode>& nodes);

}  // namespace szego

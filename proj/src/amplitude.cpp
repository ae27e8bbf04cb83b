#include "szego/amplitude.hpp"

namespace szego {

Amplitude Amplitude::parse_real(const std::string& text, int dim) { return Amplitude(parse(text, dim)); }

Amplitude Amplitude::parse_complex(const std::string& re, const std::string& im, int dim) {
    return Amplitude(parse(re, dim), parse(im, dim));
}

Complex Amplitude::operator()(std::span<const double> t) const {
    return {eval(re_, t), im_ ? eval(*im_, t) : 0.0};
}

std::string Amplitude::describe() const {
    if (!im_) return print(re_);
    return "(" + print(re_) + ") + i(" + print(*im_) + ")";
}

std::vector<Complex> evaluate(const Amplitude& a, const std::vector<QuadNode>& nodes) {
    std::vector<Complex> out;
    out.reserve(nodes.size());
    for (const auto& n : nodes) out.push_back(a(n.t));
    return out;
}

}  // namespace szego

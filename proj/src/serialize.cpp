#include "nttkit/serialize.hpp"

namespace nttkit {

using nlohmann::json;

namespace {

json complex_list(const cplx* data, Index n) {
    json out = json::array();
    for (Index i = 0; i < n; ++i) out.push_back({data[i].real(), data[i].imag()});
    return out;
}

Vector parse_complex_list(const json& j) {
    if (!j.is_array()) throw ShapeError("expected a list of [re, im] pairs");
    Vector v(static_cast<Index>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i) {
        const auto& e = j[i];
        if (!e.is_array() || e.size() != 2) throw ShapeError("complex entries are [re, im] pairs");
        v[static_cast<Index>(i)] = cplx(e[0].get<double>(), e[1].get<double>());
    }
    return v;
}

Orthogonality parse_orth(const std::string& s, Index d) {
    if (s == "none") return {};
    if (s == "left") return Orthogonality::at(d - 1, d);
    if (s == "right") return Orthogonality::at(0, d);
    if (s.rfind("center:", 0) == 0) return Orthogonality::at(std::stoll(s.substr(7)), d);
    throw ShapeError("unknown orthogonality marker '" + s + "'");
}

} // namespace

json to_json(const TTTensor& x) {
    json cores = json::array();
    for (const auto& c : x.cores()) cores.push_back(complex_list(c.left_unfolding().data(), c.left_unfolding().size()));
    return {{"shape", x.shape()}, {"ranks", x.ranks().values()}, {"cores", cores}, {"orth", to_string(x.orthogonality())}};
}

TTTensor tt_from_json(const json& j) {
    const auto shape = j.at("shape").get<Shape>();
    const TTRank ranks(j.at("ranks").get<std::vector<Index>>());
    const auto& cj = j.at("cores");
    if (ranks.order() != static_cast<Index>(shape.size()) || cj.size() != shape.size()) {
        throw ShapeError("shape, ranks and cores disagree on the order");
    }
    std::vector<TTCore> cores;
    for (std::size_t k = 0; k < shape.size(); ++k) {
        const Index l = ranks[static_cast<Index>(k)], r = ranks[static_cast<Index>(k) + 1];
        Vector v = parse_complex_list(cj[k]);
        if (v.size() != l * shape[k] * r) throw ShapeError("core " + std::to_string(k + 1) + " has the wrong size");
        cores.push_back(TTCore::from_left_unfolding(Eigen::Map<const Matrix>(v.data(), l * shape[k], r), l, shape[k]));
    }
    const Index d = static_cast<Index>(shape.size());
    return TTTensor(std::move(cores), parse_orth(j.value("orth", std::string("none")), d));
}

json to_json(const DenseTensor& a) {
    return {{"shape", a.shape()}, {"entries", complex_list(a.data().data(), a.size())}};
}

DenseTensor dense_from_json(const json& j) {
    return DenseTensor(j.at("shape").get<Shape>(), parse_complex_list(j.at("entries")));
}

} // namespace nttkit

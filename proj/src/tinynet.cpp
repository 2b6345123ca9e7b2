#include "geppg/tinynet.hpp"

#include <array>
#include <bit>
#include <cstring>
#include <istream>
#include <ostream>

namespace geppg::nn {

namespace {

constexpr std::array<char, 8> checkpoint_magic{'T', 'N', 'Y', 'N', 'E', 'T', '0', '1'};
constexpr std::uint64_t max_reasonable_length = std::uint64_t(1) << 32;

void put_u64(std::ostream& os, std::uint64_t v) {
    std::array<char, 8> bytes{};
    for (int i = 0; i < 8; ++i) bytes[i] = static_cast<char>((v >> (8 * i)) & 0xffU);
    os.write(bytes.data(), bytes.size());
}

std::uint64_t get_u64(std::istream& is) {
    std::array<char, 8> bytes{};
    if (!is.read(bytes.data(), bytes.size())) throw InputDomainError("tinynet: truncated input");
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= std::uint64_t(static_cast<unsigned char>(bytes[i])) << (8 * i);
    return v;
}

void put_u8(std::ostream& os, std::uint8_t v) { os.put(static_cast<char>(v)); }

std::uint8_t get_u8(std::istream& is) {
    char c = 0;
    if (!is.get(c)) throw InputDomainError("tinynet: truncated input");
    return static_cast<std::uint8_t>(c);
}

Activation checked_activation(std::uint8_t v) {
    if (v > static_cast<std::uint8_t>(Activation::linear)) throw InputDomainError("tinynet: bad activation tag");
    return static_cast<Activation>(v);
}

} // namespace

std::string to_string(Activation a) {
    switch (a) {
    case Activation::relu: return "relu";
    case Activation::tanh: return "tanh";
    case Activation::linear: return "linear";
    }
    return "?";
}

Activation activation_from_string(const std::string& s) {
    if (s == "relu") return Activation::relu;
    if (s == "tanh") return Activation::tanh;
    if (s == "linear") return Activation::linear;
    throw InputDomainError("unknown activation '" + s + "'");
}

void write_param_vector(std::ostream& os, const VectorXd& params) {
    put_u64(os, static_cast<std::uint64_t>(params.size()));
    for (Index i = 0; i < params.size(); ++i) put_u64(os, std::bit_cast<std::uint64_t>(params[i]));
}

VectorXd read_param_vector(std::istream& is) {
    const std::uint64_t n = get_u64(is);
    if (n > max_reasonable_length) throw InputDomainError("tinynet: implausible parameter count");
    VectorXd p(static_cast<Index>(n));
    for (Index i = 0; i < p.size(); ++i) p[i] = std::bit_cast<double>(get_u64(is));
    return p;
}

void write_checkpoint(std::ostream& os, const MlpSpec& spec, const VectorXd& params) {
    spec.validate();
    if (params.size() != spec.param_count()) throw InputDomainError("write_checkpoint: parameter length mismatch");
    os.write(checkpoint_magic.data(), checkpoint_magic.size());
    put_u64(os, spec.layer_sizes.size());
    for (Index s : spec.layer_sizes) put_u64(os, static_cast<std::uint64_t>(s));
    put_u8(os, static_cast<std::uint8_t>(spec.hidden));
    put_u8(os, static_cast<std::uint8_t>(spec.output));
    put_u8(os, spec.bias ? 1 : 0);
    write_param_vector(os, params);
}

std::pair<MlpSpec, VectorXd> read_checkpoint(std::istream& is) {
    std::array<char, 8> magic{};
    if (!is.read(magic.data(), magic.size()) || magic != checkpoint_magic) {
        throw InputDomainError("read_checkpoint: not a tinynet checkpoint");
    }
    MlpSpec spec;
    const std::uint64_t layers = get_u64(is);
    if (layers < 2 || layers > 64) throw InputDomainError("read_checkpoint: implausible layer count");
    for (std::uint64_t i = 0; i < layers; ++i) spec.layer_sizes.push_back(static_cast<Index>(get_u64(is)));
    spec.hidden = checked_activation(get_u8(is));
    spec.output = checked_activation(get_u8(is));
    spec.bias = get_u8(is) != 0;
    spec.validate();
    VectorXd params = read_param_vector(is);
    if (params.size() != spec.param_count()) throw InputDomainError("read_checkpoint: parameter length mismatch");
    return {std::move(spec), std::move(params)};
}

} // namespace geppg::nn

#ifndef GEPPG_TINYNET_HPP
#define GEPPG_TINYNET_HPP

#include "geppg/common.hpp"
#include "geppg/rng.hpp"

#include <cmath>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

/**
 * Small fully-connected networks stored as one flat parameter vector.
 *
 * Canonical parameter order is layer-major: for each layer transition, the
 * weight matrix (out x in, column-major) followed by the bias vector (out)
 * when biases are enabled. Batches are passed as matrices with one sample
 * per column.
 */
namespace geppg::nn {

enum class Activation : std::uint8_t { relu = 0, tanh = 1, linear = 2 };

std::string to_string(Activation a);
Activation activation_from_string(const std::string& s);

struct MlpSpec {
    std::vector<Index> layer_sizes;
    Activation hidden = Activation::relu;
    Activation output = Activation::tanh;
    bool bias = true;

    Index num_layers() const { return static_cast<Index>(layer_sizes.size()) - 1; }
    Index input_size() const { return layer_sizes.front(); }
    Index output_size() const { return layer_sizes.back(); }
    Activation activation(Index layer) const { return layer + 1 == num_layers() ? output : hidden; }

    Index param_count() const {
        Index n = 0;
        for (Index l = 0; l < num_layers(); ++l) {
            n += (layer_sizes[l] + (bias ? 1 : 0)) * layer_sizes[l + 1];
        }
        return n;
    }

    /// Throws InputDomainError unless there is at least one layer transition and every size is positive.
    void validate() const {
        if (layer_sizes.size() < 2) throw InputDomainError("MlpSpec: need at least one layer transition");
        for (Index s : layer_sizes) {
            if (s < 1) throw InputDomainError("MlpSpec: layer sizes must be >= 1");
        }
    }

    friend bool operator==(const MlpSpec&, const MlpSpec&) = default;
};

/// Layer outputs of a forward pass; activations[0] is the input batch.
template <typename Scalar>
struct ForwardCache {
    std::vector<Matrix<Scalar>> activations;
};

template <typename Scalar>
struct Gradients {
    Vector<Scalar> params;
    Matrix<Scalar> inputs;
};

namespace detail {

template <typename Scalar>
void activate(Matrix<Scalar>& z, Activation a) {
    switch (a) {
    case Activation::relu: z = z.cwiseMax(Scalar(0)); break;
    case Activation::tanh: z = z.array().tanh().matrix(); break;
    case Activation::linear: break;
    }
}

// Multiplies `delta` in place by the activation derivative, expressed through the activated output.
template <typename Scalar>
void apply_derivative(Matrix<Scalar>& delta, const Matrix<Scalar>& out, Activation a) {
    switch (a) {
    case Activation::relu: delta.array() *= (out.array() > Scalar(0)).template cast<Scalar>(); break;
    case Activation::tanh: delta.array() *= Scalar(1) - out.array().square(); break;
    case Activation::linear: break;
    }
}

inline void check_params(const MlpSpec& spec, Index n) {
    if (n != spec.param_count()) {
        throw InputDomainError("tinynet: parameter vector has " + std::to_string(n) + " entries, spec needs " +
                               std::to_string(spec.param_count()));
    }
}

} // namespace detail

/// Uniform initialization in [-1/sqrt(fan_in), 1/sqrt(fan_in)] per layer, biases included.
template <typename Scalar>
Vector<Scalar> init_params(const MlpSpec& spec, Rng& rng) {
    spec.validate();
    Vector<Scalar> p(spec.param_count());
    Index off = 0;
    for (Index l = 0; l < spec.num_layers(); ++l) {
        const Index in = spec.layer_sizes[l];
        const Index out = spec.layer_sizes[l + 1];
        const Scalar bound = Scalar(1) / std::sqrt(static_cast<Scalar>(in));
        const Index n = (in + (spec.bias ? 1 : 0)) * out;
        p.segment(off, n) = uniform_vector<Scalar>(n, -bound, bound, rng);
        off += n;
    }
    return p;
}

template <typename Scalar>
Matrix<Scalar> forward(const MlpSpec& spec, const Vector<Scalar>& params, const Matrix<Scalar>& inputs,
                       ForwardCache<Scalar>* cache = nullptr) {
    spec.validate();
    detail::check_params(spec, params.size());
    if (inputs.rows() != spec.input_size()) {
        throw InputDomainError("tinynet::forward: input has " + std::to_string(inputs.rows()) +
                               " rows, network expects " + std::to_string(spec.input_size()));
    }
    if (cache) {
        cache->activations.clear();
        cache->activations.push_back(inputs);
    }

    Matrix<Scalar> x = inputs;
    Index off = 0;
    for (Index l = 0; l < spec.num_layers(); ++l) {
        const Index in = spec.layer_sizes[l];
        const Index out = spec.layer_sizes[l + 1];
        Eigen::Map<const Matrix<Scalar>> w(params.data() + off, out, in);
        off += in * out;
        Matrix<Scalar> z = w * x;
        if (spec.bias) {
            Eigen::Map<const Vector<Scalar>> b(params.data() + off, out);
            z.colwise() += b;
            off += out;
        }
        detail::activate(z, spec.activation(l));
        if (cache) cache->activations.push_back(z);
        x = std::move(z);
    }
    return x;
}

template <typename Scalar>
Vector<Scalar> forward(const MlpSpec& spec, const Vector<Scalar>& params, const Vector<Scalar>& input) {
    return forward<Scalar>(spec, params, Matrix<Scalar>(input)).col(0);
}

/**
 * Reverse-mode pass for the batch recorded in `cache`.
 *
 * `upstream` holds dLoss/dOutput, one column per sample. Parameter gradients
 * are summed over the batch; input gradients are returned per sample.
 */
template <typename Scalar>
Gradients<Scalar> backward(const MlpSpec& spec, const Vector<Scalar>& params, const ForwardCache<Scalar>& cache,
                           const Matrix<Scalar>& upstream) {
    detail::check_params(spec, params.size());
    if (static_cast<Index>(cache.activations.size()) != spec.num_layers() + 1) {
        throw InputDomainError("tinynet::backward: forward cache does not match the network");
    }
    const Matrix<Scalar>& output = cache.activations.back();
    if (upstream.rows() != output.rows() || upstream.cols() != output.cols()) {
        throw InputDomainError("tinynet::backward: upstream gradient shape does not match the output");
    }

    Gradients<Scalar> g;
    g.params.setZero(params.size());

    // Offsets of each layer's weight block, walked in reverse.
    std::vector<Index> offsets(static_cast<std::size_t>(spec.num_layers()));
    Index off = 0;
    for (Index l = 0; l < spec.num_layers(); ++l) {
        offsets[l] = off;
        off += (spec.layer_sizes[l] + (spec.bias ? 1 : 0)) * spec.layer_sizes[l + 1];
    }

    Matrix<Scalar> delta = upstream;
    for (Index l = spec.num_layers() - 1; l >= 0; --l) {
        const Index in = spec.layer_sizes[l];
        const Index out = spec.layer_sizes[l + 1];
        detail::apply_derivative(delta, cache.activations[l + 1], spec.activation(l));

        const Matrix<Scalar>& x = cache.activations[l];
        Eigen::Map<Matrix<Scalar>> gw(g.params.data() + offsets[l], out, in);
        gw.noalias() = delta * x.transpose();
        if (spec.bias) {
            g.params.segment(offsets[l] + in * out, out) = delta.rowwise().sum();
        }
        Eigen::Map<const Matrix<Scalar>> w(params.data() + offsets[l], out, in);
        Matrix<Scalar> next = w.transpose() * delta;
        delta = std::move(next);
    }
    g.inputs = std::move(delta);
    return g;
}

template <typename Scalar>
struct AdamState {
    Vector<Scalar> first_moment;
    Vector<Scalar> second_moment;
    std::int64_t step_count = 0;
    Scalar lr = Scalar(1e-3);
    Scalar beta1 = Scalar(0.9);
    Scalar beta2 = Scalar(0.999);
    Scalar eps = Scalar(1e-8);

    AdamState() = default;
    AdamState(Index n, Scalar learning_rate)
        : first_moment(Vector<Scalar>::Zero(n)), second_moment(Vector<Scalar>::Zero(n)), lr(learning_rate) {}
};

/// One bias-corrected Adam update of `params` in place. Rejects non-finite
/// gradients before touching any state.
template <typename Scalar>
void adam_step(AdamState<Scalar>& adam, Eigen::Ref<Vector<Scalar>> params, const Vector<Scalar>& grad) {
    if (params.size() != grad.size() || adam.first_moment.size() != params.size()) {
        throw InputDomainError("adam_step: parameter, gradient and moment lengths differ");
    }
    if (!grad.allFinite()) throw NumericError("adam_step: non-finite gradient");

    ++adam.step_count;
    adam.first_moment = adam.beta1 * adam.first_moment + (Scalar(1) - adam.beta1) * grad;
    adam.second_moment = adam.beta2 * adam.second_moment + (Scalar(1) - adam.beta2) * grad.cwiseAbs2();
    const auto t = static_cast<Scalar>(adam.step_count);
    const Scalar c1 = Scalar(1) - std::pow(adam.beta1, t);
    const Scalar c2 = Scalar(1) - std::pow(adam.beta2, t);
    params.array() -= adam.lr * (adam.first_moment.array() / c1) /
                      ((adam.second_moment.array() / c2).sqrt() + adam.eps);
}

/// Replaces `params` with `values`; the length must match.
template <typename Scalar>
void param_set(Vector<Scalar>& params, const Vector<Scalar>& values) {
    if (params.size() != values.size()) throw InputDomainError("param_set: length mismatch");
    params = values;
}

// Binary formats: little-endian u64 length followed by IEEE-754 f64 values.
void write_param_vector(std::ostream& os, const VectorXd& params);
VectorXd read_param_vector(std::istream& is);

/// Checkpoint: magic, MlpSpec header, then the parameter block.
void write_checkpoint(std::ostream& os, const MlpSpec& spec, const VectorXd& params);
std::pair<MlpSpec, VectorXd> read_checkpoint(std::istream& is);

} // namespace geppg::nn

#endif

#include "relmeas/models.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace relmeas {

namespace {

void check_amplitudes(const cplx& a1, const cplx& a2) {
    const double total = std::norm(a1) + std::norm(a2);
    if (std::abs(total - 1.0) > 1e-10) {
        throw std::invalid_argument("amplitudes are not normalized: |a1|^2 + |a2|^2 = " +
                                    std::to_string(total));
    }
}

/// Weights |a1|^2, |a2|^2 rescaled to an exact unit sum.
std::pair<double, double> branch_weights(const cplx& a1, const cplx& a2) {
    const double w1 = std::norm(a1);
    const double w2 = std::norm(a2);
    return {w1 / (w1 + w2), w2 / (w1 + w2)};
}

}  // namespace

void VonNeumannSpec::validate() const { check_amplitudes(a1, a2); }

void ColemanHeppSpec::validate() const {
    check_amplitudes(a1, a2);
    if (n_atoms < 1) {
        throw std::invalid_argument("chain needs at least one atom");
    }
    if (n_atoms > kMaxChainAtoms) {
        throw std::invalid_argument("chain length cap exceeded");
    }
}

SubsystemLayout vn_layout(bool include_detector) {
    std::vector<Factor> factors{{"S", 2}};
    if (include_detector) factors.push_back({"D", 2});
    factors.push_back({"O", 2});
    return SubsystemLayout(std::move(factors));
}

std::string chain_atom_label(int i) { return "A" + std::to_string(i); }

SubsystemLayout ch_layout(int n_atoms) {
    if (n_atoms < 1 || n_atoms > kMaxChainAtoms) {
        throw std::invalid_argument("chain length cap exceeded");
    }
    std::vector<Factor> factors{{"S", 2}};
    for (int i = 1; i <= n_atoms; ++i) {
        factors.push_back({chain_atom_label(i), 2});
    }
    return SubsystemLayout(std::move(factors));
}

StateVector vn_initial(const VonNeumannSpec& spec) {
    spec.validate();
    SubsystemLayout layout = vn_layout(spec.include_detector);
    Vector amps = Vector::Zero(static_cast<Eigen::Index>(layout.total_dim()));
    const std::size_t s_stride = layout.stride(layout.index_of("S"));
    amps[0] = spec.a1;                                   // |s1, D0, O0>
    amps[static_cast<Eigen::Index>(s_stride)] = spec.a2; // |s2, D0, O0>
    return StateVector(std::move(layout), std::move(amps));
}

OperatorMatrix vn_measurement_unitary(const VonNeumannSpec& spec) {
    SubsystemLayout layout = vn_layout(spec.include_detector);
    const std::size_t dim = layout.total_dim();
    const std::size_t s_pos = layout.index_of("S");
    Matrix u = Matrix::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
    for (std::size_t c = 0; c < dim; ++c) {
        const std::size_t s = layout.digit(c, s_pos);
        std::size_t r = c;
        for (std::size_t k = 0; k < layout.num_factors(); ++k) {
            if (k == s_pos) continue;
            r = layout.with_digit(r, k, (layout.digit(r, k) + s) % 2);
        }
        u(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = cplx(1.0, 0.0);
    }
    return OperatorMatrix(std::move(layout), std::move(u), false);
}

DensityMatrix vn_mixed(const VonNeumannSpec& spec) {
    spec.validate();
    SubsystemLayout layout = vn_layout(spec.include_detector);
    const std::size_t dim = layout.total_dim();
    const auto [w1, w2] = branch_weights(spec.a1, spec.a2);
    // Branch basis states |s1 D1 O1> (index 0) and |s2 D2 O2| (all digits 1).
    return mix({{w1, density_from_pure(StateVector::basis(layout, 0))},
                {w2, density_from_pure(StateVector::basis(layout, dim - 1))}});
}

DensityMatrix vn_initial_mixed(const VonNeumannSpec& spec) {
    spec.validate();
    SubsystemLayout layout = vn_layout(spec.include_detector);
    const std::size_t s_stride = layout.stride(layout.index_of("S"));
    const auto [w1, w2] = branch_weights(spec.a1, spec.a2);
    return mix({{w1, density_from_pure(StateVector::basis(layout, 0))},
                {w2, density_from_pure(StateVector::basis(layout, s_stride))}});
}

OperatorMatrix vn_interference_operator(const VonNeumannSpec& spec) {
    SubsystemLayout layout = vn_layout(spec.include_detector);
    const std::size_t dim = layout.total_dim();
    Matrix b = Matrix::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
    // Coherence between the two branch basis states; with the detector in
    // the chain every factor flips, otherwise just S and O.
    b(0, static_cast<Eigen::Index>(dim - 1)) = cplx(1.0, 0.0);
    b(static_cast<Eigen::Index>(dim - 1), 0) = cplx(1.0, 0.0);
    return OperatorMatrix(std::move(layout), std::move(b), true);
}

OperatorMatrix binary_measurement_unitary(const std::string& source_label,
                                          const std::string& target_label) {
    SubsystemLayout layout({{source_label, 2}, {target_label, 2}});
    Matrix u = Matrix::Zero(4, 4);
    for (std::size_t c = 0; c < 4; ++c) {
        const std::size_t s = c >> 1;
        const std::size_t t = (c & 1) ^ s;
        u(static_cast<Eigen::Index>((s << 1) | t), static_cast<Eigen::Index>(c)) = cplx(1.0, 0.0);
    }
    return OperatorMatrix(std::move(layout), std::move(u), false);
}

StateVector ch_initial(const ColemanHeppSpec& spec) {
    spec.validate();
    SubsystemLayout layout = ch_layout(spec.n_atoms);
    Vector amps = Vector::Zero(static_cast<Eigen::Index>(layout.total_dim()));
    const std::size_t s_stride = layout.stride(0);
    amps[0] = spec.a1;                                   // |u0> chain up
    amps[static_cast<Eigen::Index>(s_stride)] = spec.a2; // |d0> chain up
    return StateVector(std::move(layout), std::move(amps));
}

OperatorMatrix ch_passage_unitary(int n_atoms) {
    SubsystemLayout layout = ch_layout(n_atoms);
    const std::size_t dim = layout.total_dim();
    if (dim > kMaxOperatorDim) {
        throw std::invalid_argument("operator dimension cap exceeded");
    }
    const std::size_t s_pos = 0;

    // Ordered product of controlled pi rotations, atom index ascending.
    // Each gate is a monomial matrix; composing left-multiplies by it:
    // row i of (G U) is phase * row m(i) of U, where m flips atom k when
    // the S digit of i is down.
    Matrix u = Matrix::Identity(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
    for (int atom = 1; atom <= n_atoms; ++atom) {
        const std::size_t k = layout.index_of(chain_atom_label(atom));
        Matrix next(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
        for (std::size_t i = 0; i < dim; ++i) {
            if (layout.digit(i, s_pos) == 0) {
                next.row(static_cast<Eigen::Index>(i)) = u.row(static_cast<Eigen::Index>(i));
            } else {
                const std::size_t src = layout.with_digit(i, k, 1 - layout.digit(i, k));
                next.row(static_cast<Eigen::Index>(i)) =
                    cplx(0.0, -1.0) * u.row(static_cast<Eigen::Index>(src));
            }
        }
        u = std::move(next);
    }
    return OperatorMatrix(std::move(layout), std::move(u), false);
}

OperatorMatrix ch_undo_unitary(int n_atoms) { return ch_passage_unitary(n_atoms).adjoint(); }

OperatorMatrix ch_polarization(int n_atoms) {
    SubsystemLayout layout = ch_layout(n_atoms);
    const auto dim = static_cast<Eigen::Index>(layout.total_dim());
    Matrix sum = Matrix::Zero(dim, dim);
    for (int atom = 1; atom <= n_atoms; ++atom) {
        sum += lift_op(pauli_z("z"), chain_atom_label(atom), layout).entries();
    }
    sum /= static_cast<double>(n_atoms);
    return OperatorMatrix(std::move(layout), std::move(sum), true);
}

namespace {

/// sigma_x on S tensored with one single-atom override inside a sigma_y chain.
Matrix spin_flip_chain(const SubsystemLayout& layout, int n_atoms, int x_atom) {
    OperatorMatrix acc = pauli_x("S");
    for (int atom = 1; atom <= n_atoms; ++atom) {
        const auto label = chain_atom_label(atom);
        acc = tensor_product(acc, atom == x_atom ? pauli_x(label) : pauli_y(label));
    }
    if (acc.layout() != layout) {
        throw std::logic_error("chain operator layout mismatch");
    }
    return acc.entries();
}

}  // namespace

OperatorMatrix ch_interference_operator(int n_atoms) {
    SubsystemLayout layout = ch_layout(n_atoms);
    Matrix b = spin_flip_chain(layout, n_atoms, /*x_atom=*/0);
    return OperatorMatrix(std::move(layout), std::move(b), true);
}

OperatorMatrix ch_commutator_reference(int n_atoms) {
    SubsystemLayout layout = ch_layout(n_atoms);
    const auto dim = static_cast<Eigen::Index>(layout.total_dim());
    Matrix sum = Matrix::Zero(dim, dim);
    for (int atom = 1; atom <= n_atoms; ++atom) {
        sum += spin_flip_chain(layout, n_atoms, atom);
    }
    sum *= cplx(0.0, -2.0 / static_cast<double>(n_atoms));
    return OperatorMatrix(std::move(layout), std::move(sum), false);
}

DensityMatrix ch_mixed(const ColemanHeppSpec& spec) {
    spec.validate();
    SubsystemLayout layout = ch_layout(spec.n_atoms);
    const std::size_t dim = layout.total_dim();
    const auto [w1, w2] = branch_weights(spec.a1, spec.a2);
    // |u0> chain-up and |d0> chain-down branch projectors; the passage
    // phase (-i)^N drops out of the projectors.
    return mix({{w1, density_from_pure(StateVector::basis(layout, 0))},
                {w2, density_from_pure(StateVector::basis(layout, dim - 1))}});
}

DensityMatrix ch_initial_mixed(const ColemanHeppSpec& spec) {
    spec.validate();
    SubsystemLayout layout = ch_layout(spec.n_atoms);
    const std::size_t s_stride = layout.stride(0);
    const auto [w1, w2] = branch_weights(spec.a1, spec.a2);
    return mix({{w1, density_from_pure(StateVector::basis(layout, 0))},
                {w2, density_from_pure(StateVector::basis(layout, s_stride))}});
}

}  // namespace relmeas

#pragma once

#include <string>

#include "relmeas/operator_matrix.hpp"
#include "relmeas/ops.hpp"
#include "relmeas/state.hpp"

namespace relmeas {

/// Binary measurement chain: system S with two outcome states, observer O
/// (optionally preceded by a detector D) that copies the S basis value.
struct VonNeumannSpec {
    cplx a1;
    cplx a2;
    bool include_detector = false;

    /// |a1|^2 + |a2|^2 = 1 within 1e-10.
    void validate() const;
};

/// Spin measured by an N-atom spin-half chain whose collective
/// polarization acts as the pointer.
struct ColemanHeppSpec {
    cplx a1;
    cplx a2;
    int n_atoms = 1;

    void validate() const;
};

inline constexpr int kMaxChainAtoms = 20;

/// Layout S (x) [D] (x) O, each factor two-dimensional.
SubsystemLayout vn_layout(bool include_detector);
/// Layout S (x) A1 ... An.
SubsystemLayout ch_layout(int n_atoms);
std::string chain_atom_label(int i);  // "A1", "A2", ...

// --- binary (Von Neumann) model ------------------------------------------

/// (a1|s1> + a2|s2>) (x) |O0> ((x) |D0| when the detector is included).
StateVector vn_initial(const VonNeumannSpec& spec);
/// Unitary copying the S basis value into O (and D): |s_i>|O0> -> |s_i>|O_i>.
OperatorMatrix vn_measurement_unitary(const VonNeumannSpec& spec);
/// Post-measurement mixed counterpart with weights |a1|^2, |a2|^2.
DensityMatrix vn_mixed(const VonNeumannSpec& spec);
/// Pre-measurement mixed counterpart: classical mixture of S eigenstates,
/// observer still in its ready state.
DensityMatrix vn_initial_mixed(const VonNeumannSpec& spec);
/// Coherence observable |s1 O1><s2 O2| + h.c. (all factors flipped when the
/// detector is included); zero expectation on the mixed counterpart.
OperatorMatrix vn_interference_operator(const VonNeumannSpec& spec);

/// Basis-copy coupling between two 2-dim factors, on the layout
/// [source, target]: |s>|t> -> |s>|t XOR s>.
OperatorMatrix binary_measurement_unitary(const std::string& source_label,
                                          const std::string& target_label);

// --- spin-chain (Coleman-Hepp) model --------------------------------------

/// (a1|u0> + a2|d0>) (x) all-up chain.
StateVector ch_initial(const ColemanHeppSpec& spec);
/// Ordered product over atoms (ascending index) of controlled pi rotations:
/// identity when S is up, -i sigma_x on atom i when S is down. The
/// completed passage maps the all-up chain to
/// a1|u>chain_up + a2(-i)^N|d>chain_down.
OperatorMatrix ch_passage_unitary(int n_atoms);
/// Adjoint of the passage; composition with it is the identity.
OperatorMatrix ch_undo_unitary(int n_atoms);
/// Collective pointer mu_z = (1/N) sum_i sigma_z^i on the full layout.
OperatorMatrix ch_polarization(int n_atoms);
/// Coherence observable B = sigma_x^S prod_i sigma_y^i; Hermitian, B^2 = I.
OperatorMatrix ch_interference_operator(int n_atoms);
/// Closed form of [mu_z, B]: -(2i/N) sigma_x^S sum_i sigma_x^i prod_{j!=i} sigma_y^j.
OperatorMatrix ch_commutator_reference(int n_atoms);
/// Post-passage mixed counterpart (branch projectors with weights |a_i|^2).
DensityMatrix ch_mixed(const ColemanHeppSpec& spec);
/// Pre-passage mixed counterpart: S dephased, chain all-up.
DensityMatrix ch_initial_mixed(const ColemanHeppSpec& spec);

}  // namespace relmeas

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "relmeas/ops.hpp"
#include "test_support.hpp"

using namespace relmeas;
using test_support::kron_ref;
using test_support::matmul_ref;
using test_support::max_abs_diff;

namespace {

SubsystemLayout qubit(const std::string& label) { return SubsystemLayout({{label, 2}}); }

StateVector up(const std::string& label) { return StateVector::basis(qubit(label), 0); }
StateVector down(const std::string& label) { return StateVector::basis(qubit(label), 1); }

StateVector superposition(const std::string& label, cplx a1, cplx a2) {
    Vector v(2);
    v << a1, a2;
    return StateVector(qubit(label), v);
}

}  // namespace

TEST_CASE("layout rejects duplicates and zero dims") {
    CHECK_THROWS_AS(SubsystemLayout({{"S", 2}, {"S", 2}}), std::invalid_argument);
    CHECK_THROWS_AS(SubsystemLayout({{"S", 0}}), std::invalid_argument);
    const SubsystemLayout layout({{"S", 2}, {"O", 3}});
    CHECK(layout.total_dim() == 6);
    CHECK(layout.stride(0) == 3);
    CHECK(layout.stride(1) == 1);
    CHECK(layout.digit(5, 0) == 1);
    CHECK(layout.digit(5, 1) == 2);
    CHECK_THROWS_AS(layout.index_of("X"), std::invalid_argument);
}

TEST_CASE("tensor product of basis states is a basis state") {
    const StateVector prod = tensor_product(up("S"), up("O"));
    Vector expected(4);
    expected << 1, 0, 0, 0;
    CHECK(max_abs_diff(prod.amplitudes(), expected) == 0.0);
    CHECK_THROWS_AS(tensor_product(up("S"), up("S")), std::invalid_argument);
}

TEST_CASE("tensor product builds the two-branch initial state") {
    const StateVector psi0 = tensor_product(superposition("S", 0.6, 0.8), up("O"));
    Vector expected(4);
    expected << 0.6, 0, 0.8, 0;
    CHECK(max_abs_diff(psi0.amplitudes(), expected) == 0.0);
    CHECK(psi0.norm() == doctest::Approx(1.0));
}

TEST_CASE("state tensor product is associative") {
    std::mt19937_64 rng(7001);
    for (int trial = 0; trial < 20; ++trial) {
        const StateVector a(qubit("a"), test_support::random_state_amplitudes(2, rng));
        const StateVector b(qubit("b"), test_support::random_state_amplitudes(2, rng));
        const StateVector c(qubit("c"), test_support::random_state_amplitudes(2, rng));
        const StateVector left = tensor_product(tensor_product(a, b), c);
        const StateVector right = tensor_product(a, tensor_product(b, c));
        // index-arithmetic oracle
        Vector expected(8);
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j)
                for (int k = 0; k < 2; ++k)
                    expected[(i * 2 + j) * 2 + k] =
                        a.amplitudes()[i] * b.amplitudes()[j] * c.amplitudes()[k];
        CHECK(max_abs_diff(left.amplitudes(), expected) < 1e-15);
        CHECK(max_abs_diff(right.amplitudes(), expected) < 1e-15);
    }
}

TEST_CASE("operator tensor product matches the hand-expanded 4x4") {
    const OperatorMatrix sx_sy = tensor_product(pauli_x("S"), pauli_y("A1"));
    Matrix expected(4, 4);
    const cplx i(0, 1);
    expected << 0, 0, 0, -i,
                0, 0, i, 0,
                0, -i, 0, 0,
                i, 0, 0, 0;
    CHECK(max_abs_diff(sx_sy.entries(), expected) == 0.0);
    CHECK(sx_sy.hermitian_hint());
}

TEST_CASE("operator tensor product acts factorwise on product states") {
    const OperatorMatrix op = tensor_product(pauli_x("S"), OperatorMatrix::identity(qubit("O")));
    const StateVector in = tensor_product(up("S"), up("O"));
    const StateVector out = apply_operator(op, in);
    const StateVector expected = tensor_product(down("S"), up("O"));
    CHECK(max_abs_diff(out.amplitudes(), expected.amplitudes()) == 0.0);
}

TEST_CASE("chain of sigma_y factors has entries of modulus zero or one") {
    const OperatorMatrix chain =
        tensor_product(tensor_product(pauli_y("A1"), pauli_y("A2")), pauli_y("A3"));
    for (Eigen::Index r = 0; r < chain.entries().rows(); ++r) {
        for (Eigen::Index c = 0; c < chain.entries().cols(); ++c) {
            const double mod = std::abs(chain.entries()(r, c));
            CHECK((mod == 0.0 || mod == doctest::Approx(1.0).epsilon(1e-14)));
        }
    }
}

TEST_CASE("tensor product distributes over application for random factors") {
    std::mt19937_64 rng(7002);
    for (int trial = 0; trial < 20; ++trial) {
        const OperatorMatrix a =
            OperatorMatrix::single_factor("a", 2, test_support::random_matrix(2, rng));
        const OperatorMatrix b =
            OperatorMatrix::single_factor("b", 2, test_support::random_matrix(2, rng));
        const StateVector psi(qubit("a"), test_support::random_state_amplitudes(2, rng));
        const StateVector phi(qubit("b"), test_support::random_state_amplitudes(2, rng));
        const StateVector lhs = apply_operator(tensor_product(a, b), tensor_product(psi, phi));
        const StateVector rhs = tensor_product(apply_operator(a, psi), apply_operator(b, phi));
        CHECK(max_abs_diff(lhs.amplitudes(), rhs.amplitudes()) < 1e-14);
    }
}

TEST_CASE("lift embeds with identity on the other factors") {
    const SubsystemLayout layout({{"S", 2}, {"A1", 2}, {"A2", 2}});
    const OperatorMatrix lifted = lift_op(pauli_z("z"), "S", layout);
    const Matrix expected = kron_ref(kron_ref(pauli_z("z").entries(), Matrix::Identity(2, 2)),
                                     Matrix::Identity(2, 2));
    CHECK(max_abs_diff(lifted.entries(), expected) == 0.0);

    CHECK_THROWS_AS(lift_op(pauli_z("z"), "X", layout), std::invalid_argument);
    const OperatorMatrix big = OperatorMatrix::single_factor("q", 3, Matrix::Identity(3, 3));
    CHECK_THROWS_AS(lift_op(big, "S", layout), std::invalid_argument);
}

TEST_CASE("lift onto one chain atom flips only that atom") {
    const SubsystemLayout layout({{"S", 2}, {"A1", 2}, {"A2", 2}, {"A3", 2}});
    const StateVector all_up = StateVector::basis(layout, 0);
    const StateVector flipped = apply_operator(lift_op(pauli_x("x"), "A2", layout), all_up);
    // S=0, A1=0, A2=1, A3=0 -> flat index = stride of A2
    const std::size_t expected_index = layout.stride(2);
    Vector expected = Vector::Zero(16);
    expected[static_cast<Eigen::Index>(expected_index)] = 1.0;
    CHECK(max_abs_diff(flipped.amplitudes(), expected) == 0.0);
}

TEST_CASE("lifted operators on disjoint factors commute") {
    const SubsystemLayout layout({{"S", 2}, {"A1", 2}, {"A2", 2}});
    const OperatorMatrix a = lift_op(pauli_x("x"), "A1", layout);
    const OperatorMatrix b = lift_op(pauli_y("y"), "A2", layout);
    CHECK(max_abs(commutator(a, b).entries()) == 0.0);
    const OperatorMatrix az = lift_op(pauli_z("z"), "A1", layout);
    const OperatorMatrix bz = lift_op(pauli_z("z"), "A2", layout);
    CHECK(max_abs(commutator(az, bz).entries()) == 0.0);
}

TEST_CASE("apply_operator basics") {
    const StateVector u = up("S");
    const StateVector iu = apply_operator(OperatorMatrix::identity(qubit("S")), u);
    CHECK(max_abs_diff(iu.amplitudes(), u.amplitudes()) == 0.0);

    const StateVector yu = apply_operator(pauli_y("S"), u);
    Vector expected(2);
    expected << 0.0, cplx(0, 1);
    CHECK(max_abs_diff(yu.amplitudes(), expected) == 0.0);

    CHECK_THROWS_AS(apply_operator(pauli_y("O"), u), std::invalid_argument);
}

TEST_CASE("density conjugation preserves trace, hermiticity, spectrum") {
    std::mt19937_64 rng(7003);
    const SubsystemLayout layout({{"q", 4}});
    const DensityMatrix rho =
        DensityMatrix::validated(layout, test_support::random_density_entries(4, rng));

    const DensityMatrix same = evolve_density(OperatorMatrix::identity(layout), rho);
    CHECK(max_abs_diff(same.entries(), rho.entries()) == 0.0);

    const OperatorMatrix u(layout, test_support::random_unitary(4, rng));
    const DensityMatrix evolved = evolve_density(u, rho);
    CHECK(evolved.trace_real() == doctest::Approx(1.0).epsilon(1e-12));

    Eigen::SelfAdjointEigenSolver<Matrix> before(rho.entries(), Eigen::EigenvaluesOnly);
    Eigen::SelfAdjointEigenSolver<Matrix> after(evolved.entries(), Eigen::EigenvaluesOnly);
    CHECK((before.eigenvalues() - after.eigenvalues()).cwiseAbs().maxCoeff() < 1e-9);

    const OperatorMatrix not_unitary(layout, Matrix::Identity(4, 4) * 2.0);
    CHECK_THROWS_AS(evolve_density(not_unitary, rho), std::invalid_argument);
}

TEST_CASE("measurement unitary turns the initial projector into the entangled one") {
    // CNOT on S (x) O
    const SubsystemLayout layout({{"S", 2}, {"O", 2}});
    Matrix cnot = Matrix::Zero(4, 4);
    cnot(0, 0) = cnot(1, 1) = cnot(2, 3) = cnot(3, 2) = 1.0;
    const OperatorMatrix u(layout, cnot);

    Vector initial(4);
    initial << 0.6, 0, 0.8, 0;
    const DensityMatrix rho0 = density_from_pure(StateVector(layout, initial));
    const DensityMatrix rho1 = evolve_density(u, rho0);

    Vector final_amps(4);
    final_amps << 0.6, 0, 0, 0.8;
    const DensityMatrix expected = density_from_pure(StateVector(layout, final_amps));
    CHECK(max_abs_diff(rho1.entries(), expected.entries()) < 1e-15);
}

TEST_CASE("partial trace of a product projector keeps the other factor") {
    const SubsystemLayout layout({{"S", 2}, {"O", 2}});
    const DensityMatrix rho = density_from_pure(tensor_product(up("S"), up("O")));
    const DensityMatrix reduced = partial_trace(rho, {"O"});
    CHECK(reduced.layout().factor(0).label == "O");
    Matrix expected = Matrix::Zero(2, 2);
    expected(0, 0) = 1.0;
    CHECK(max_abs_diff(reduced.entries(), expected) == 0.0);

    CHECK_THROWS_AS(partial_trace(rho, {}), std::invalid_argument);
    CHECK_THROWS_AS(partial_trace(rho, {"X"}), std::invalid_argument);
}

TEST_CASE("partial trace of the entangled state is the branch-weight diagonal") {
    const SubsystemLayout layout({{"S", 2}, {"O", 2}});
    Vector amps(4);
    amps << 0.6, 0, 0, 0.8;
    const DensityMatrix rho = density_from_pure(StateVector(layout, amps));
    const DensityMatrix reduced = partial_trace(rho, {"O"});
    Matrix expected = Matrix::Zero(2, 2);
    expected(0, 0) = 0.36;
    expected(1, 1) = 0.64;
    CHECK(max_abs_diff(reduced.entries(), expected) < 1e-15);

    // Same reduced state from the mixed counterpart.
    const DensityMatrix mixed = mix({{0.36, density_from_pure(StateVector::basis(layout, 0))},
                                     {0.64, density_from_pure(StateVector::basis(layout, 3))}});
    const DensityMatrix reduced_mixed = partial_trace(mixed, {"O"});
    CHECK(max_abs_diff(reduced.entries(), reduced_mixed.entries()) < 1e-15);
}

TEST_CASE("partial trace preserves trace and positivity on random states") {
    std::mt19937_64 rng(7004);
    std::uniform_int_distribution<int> dim_dist(2, 4);
    std::uniform_int_distribution<int> pick(0, 2);
    for (int trial = 0; trial < 1000; ++trial) {
        const SubsystemLayout layout({{"a", static_cast<std::size_t>(dim_dist(rng))},
                                      {"b", static_cast<std::size_t>(dim_dist(rng))},
                                      {"c", static_cast<std::size_t>(dim_dist(rng))}});
        const DensityMatrix rho = DensityMatrix::validated(
            layout, test_support::random_density_entries(
                        static_cast<Eigen::Index>(layout.total_dim()), rng));
        const std::string keep = layout.factor(static_cast<std::size_t>(pick(rng))).label;
        // validated() re-checks Hermiticity, trace and positivity.
        const DensityMatrix reduced = partial_trace(rho, {keep});
        CHECK(std::abs(reduced.trace_real() - 1.0) < 1e-12);
    }
}

TEST_CASE("expectation values") {
    const StateVector psi = superposition("S", cplx(0.4, 0.3), std::sqrt(0.75));
    CHECK(expectation(OperatorMatrix::identity(qubit("S")), psi).real() ==
          doctest::Approx(1.0).epsilon(1e-12));

    // <sigma_z> on the two-branch state equals the weight difference.
    const StateVector two = superposition("S", 0.6, 0.8);
    CHECK(expectation(pauli_z("S"), two).real() == doctest::Approx(-0.28).epsilon(1e-12));

    CHECK_THROWS_AS(expectation(pauli_z("O"), psi), std::invalid_argument);
}

TEST_CASE("commutator identities") {
    std::mt19937_64 rng(7005);
    const SubsystemLayout layout({{"q", 3}});
    const OperatorMatrix a(layout, test_support::random_matrix(3, rng));
    const OperatorMatrix b(layout, test_support::random_matrix(3, rng));

    CHECK(max_abs(commutator(a, a).entries()) == 0.0);
    CHECK(max_abs_diff(commutator(a, b).entries(), Matrix(-commutator(b, a).entries())) < 1e-14);

    // reference product route
    const Matrix expected = matmul_ref(a.entries(), b.entries()) -
                            matmul_ref(b.entries(), a.entries());
    CHECK(max_abs_diff(commutator(a, b).entries(), expected) < 1e-13);
}

TEST_CASE("density_from_pure builds rank-1 projectors") {
    const DensityMatrix rho = density_from_pure(up("S"));
    Matrix expected = Matrix::Zero(2, 2);
    expected(0, 0) = 1.0;
    CHECK(max_abs_diff(rho.entries(), expected) == 0.0);

    std::mt19937_64 rng(7006);
    for (int trial = 0; trial < 10; ++trial) {
        const SubsystemLayout layout({{"q", 5}});
        const StateVector psi(layout, test_support::random_state_amplitudes(5, rng));
        CHECK(density_from_pure(psi).purity() == doctest::Approx(1.0).epsilon(1e-12));
    }

    Vector unnorm(2);
    unnorm << 1.0, 1.0;
    CHECK_THROWS_AS(density_from_pure(StateVector(qubit("S"), unnorm)), std::invalid_argument);
}

TEST_CASE("mix forms convex combinations") {
    const SubsystemLayout layout({{"S", 2}, {"O", 2}});
    const DensityMatrix one = density_from_pure(StateVector::basis(layout, 0));
    const DensityMatrix two = density_from_pure(StateVector::basis(layout, 3));

    const DensityMatrix single = mix({{1.0, one}});
    CHECK(max_abs_diff(single.entries(), one.entries()) == 0.0);

    const DensityMatrix both = mix({{0.36, one}, {0.64, two}});
    CHECK(both.entries()(0, 0).real() == doctest::Approx(0.36));
    CHECK(both.entries()(3, 3).real() == doctest::Approx(0.64));
    CHECK(max_abs(Matrix(both.entries() - both.entries().cwiseProduct(
                                              Matrix::Identity(4, 4)))) == 0.0);
    CHECK(both.purity() == doctest::Approx(0.5392).epsilon(1e-12));

    CHECK_THROWS_AS(mix({{-0.1, one}, {1.1, two}}), std::invalid_argument);
    CHECK_THROWS_AS(mix({{0.5, one}, {0.6, two}}), std::invalid_argument);
}

TEST_CASE("density validation rejects bad matrices") {
    const SubsystemLayout layout({{"S", 2}});
    Matrix not_hermitian(2, 2);
    not_hermitian << 1.0, 1.0, 0.0, 0.0;
    CHECK_THROWS_AS(DensityMatrix::validated(layout, not_hermitian), std::runtime_error);

    Matrix wrong_trace = Matrix::Identity(2, 2);
    CHECK_THROWS_AS(DensityMatrix::validated(layout, wrong_trace), std::runtime_error);

    Matrix negative(2, 2);
    negative << 1.5, 0.0, 0.0, -0.5;
    CHECK_THROWS_AS(DensityMatrix::validated(layout, negative), std::runtime_error);
}

TEST_CASE("embed places a two-factor operator inside a larger layout") {
    const SubsystemLayout pair({{"S", 2}, {"Op", 2}});
    Matrix cnot = Matrix::Zero(4, 4);
    cnot(0, 0) = cnot(1, 1) = cnot(2, 3) = cnot(3, 2) = 1.0;
    const OperatorMatrix gate(pair, cnot);

    const SubsystemLayout big({{"S", 2}, {"O", 2}, {"Op", 2}});
    const OperatorMatrix embedded = embed_op(gate, big);
    CHECK(embedded.is_unitary(1e-15));
    // |S=1, O=1, Op=0> -> |S=1, O=1, Op=1>
    const StateVector in = StateVector::basis(big, 6);
    const StateVector out = apply_operator(embedded, in);
    Vector expected = Vector::Zero(8);
    expected[7] = 1.0;
    CHECK(max_abs_diff(out.amplitudes(), expected) == 0.0);
}

#include <catch2/catch_amalgamated.hpp>
#include <sstream>

#include "ddpc/plant.hpp"

using namespace ddpc;

TEST_CASE("benchmark_system returns the fixed plant matrices") {
    const LinearSystem sys = benchmark_system(1);
    Matrix a(2, 2), b(2, 1), c(1, 2);
    a << 0.7326, -0.0861, 0.1722, 0.9909;
    b << 0.0609, 0.0064;
    c << 0.0, 1.4142;
    REQUIRE((sys.a() - a).cwiseAbs().maxCoeff() == 0.0);
    REQUIRE((sys.b() - b).cwiseAbs().maxCoeff() == 0.0);
    REQUIRE((sys.c() - c).cwiseAbs().maxCoeff() == 0.0);
    REQUIRE(sys.d()(0, 0) == 0.0);
}

TEST_CASE("benchmark_system stabilizes A - K C and is seed-deterministic") {
    for (std::uint64_t seed : {1ull, 2ull, 99ull}) {
        const LinearSystem sys = benchmark_system(seed);
        REQUIRE(sys.lambda_max() < 1.0);
        const LinearSystem again = benchmark_system(seed);
        REQUIRE((sys.k() - again.k()).cwiseAbs().maxCoeff() == 0.0);
    }
    REQUIRE((benchmark_system(1).k() - benchmark_system(2).k()).cwiseAbs().maxCoeff() > 0.0);
}

TEST_CASE("construction rejects unstable A - K C") {
    const LinearSystem base = benchmark_system(1);
    Matrix k(2, 1);
    k << 0.0, -2.0;  // pushes the (2,2) entry of A - K C far above 1
    REQUIRE_THROWS_AS(LinearSystem(base.a(), base.b(), base.c(), base.d(), k),
                      std::invalid_argument);
}

TEST_CASE("construction rejects non-minimal realizations") {
    const LinearSystem base = benchmark_system(1);
    REQUIRE_THROWS_AS(LinearSystem(base.a(), Matrix::Zero(2, 1), base.c(), base.d(), base.k()),
                      std::invalid_argument);
    REQUIRE_THROWS_AS(LinearSystem(base.a(), base.b(), Matrix::Zero(1, 2), base.d(), base.k()),
                      std::invalid_argument);
}

TEST_CASE("zero state, zero input, zero noise stays at zero") {
    const LinearSystem sys = benchmark_system(3);
    const TrajectoryBatch b = simulate(sys, Vector::Zero(2), Matrix::Zero(1, 50), {0.0, 0});
    REQUIRE(b.y.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("unit impulse response starts with D then C B") {
    const LinearSystem sys = benchmark_system(3);
    Matrix u = Matrix::Zero(1, 10);
    u(0, 0) = 1.0;
    const Matrix y = deterministic_response(sys, Vector::Zero(2), u);
    REQUIRE(y(0, 0) == 0.0);  // D = 0
    REQUIRE(y(0, 1) == Catch::Approx(1.4142 * 0.0064).epsilon(1e-12));
}

TEST_CASE("simulate is deterministic for a fixed seed") {
    const LinearSystem sys = benchmark_system(4);
    Matrix u = Matrix::Random(1, 100);
    const TrajectoryBatch b1 = simulate(sys, Vector::Zero(2), u, {0.3, 77});
    const TrajectoryBatch b2 = simulate(sys, Vector::Zero(2), u, {0.3, 77});
    REQUIRE((b1.y - b2.y).cwiseAbs().maxCoeff() == 0.0);
    REQUIRE((*b1.e - *b2.e).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("deterministic_response equals simulate with zero noise") {
    const LinearSystem sys = benchmark_system(5);
    Matrix u = Matrix::Random(1, 60);
    Vector x0(2);
    x0 << 0.4, -0.2;
    REQUIRE((deterministic_response(sys, x0, u) - simulate(sys, x0, u, {0.0, 9}).y)
                .cwiseAbs()
                .maxCoeff() == 0.0);
}

TEST_CASE("output at t = 0 from x0 = [1,1] with zero input is C x0") {
    const LinearSystem sys = benchmark_system(5);
    Vector x0(2);
    x0 << 1.0, 1.0;
    const Matrix y = deterministic_response(sys, x0, Matrix::Zero(1, 3));
    REQUIRE(y(0, 0) == Catch::Approx(1.4142).epsilon(1e-12));
}

TEST_CASE("superposition of deterministic responses") {
    const LinearSystem sys = benchmark_system(6);
    Matrix u1 = Matrix::Random(1, 40);
    Matrix u2 = Matrix::Random(1, 40);
    Vector x0(2);
    x0 << 1.0, -1.0;
    const Matrix lhs = deterministic_response(sys, x0, u1 + u2);
    const Matrix rhs =
        deterministic_response(sys, x0, u1) + deterministic_response(sys, Vector::Zero(2), u2);
    REQUIRE((lhs - rhs).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("measure_snr returns infinity on noise-free data") {
    const LinearSystem sys = benchmark_system(8);
    Matrix u = Matrix::Random(1, 100);
    const TrajectoryBatch b = simulate(sys, Vector::Zero(2), u, {0.0, 1});
    REQUIRE(std::isinf(measure_snr(b, sys, Vector::Zero(2))));
}

TEST_CASE("doubling the innovation std lowers SNR by about 6 dB") {
    const LinearSystem sys = benchmark_system(9);
    Rng rng(91);
    Matrix u(1, 20000);
    for (Eigen::Index t = 0; t < u.cols(); ++t) u(0, t) = rng.uniform(-5.0, 5.0);
    const Vector x0 = Vector::Zero(2);
    const double s1 = measure_snr(simulate(sys, x0, u, {0.2, 5}), sys, x0);
    const double s2 = measure_snr(simulate(sys, x0, u, {0.4, 5}), sys, x0);
    REQUIRE(s1 - s2 == Catch::Approx(6.0206).margin(0.7));
}

TEST_CASE("innovation_std_for_snr hits the target SNR") {
    const LinearSystem sys = benchmark_system(10);
    Rng rng(101);
    Matrix u(1, 20000);
    for (Eigen::Index t = 0; t < u.cols(); ++t) u(0, t) = rng.uniform(-5.0, 5.0);
    const Vector x0 = Vector::Zero(2);
    const double std_e = innovation_std_for_snr(sys, x0, u, 18.0);
    REQUIRE(std_e > 0.0);
    const double measured = measure_snr(simulate(sys, x0, u, {std_e, 6}), sys, x0);
    REQUIRE(measured == Catch::Approx(18.0).margin(1.0));
}

TEST_CASE("stable plant stays bounded over ten thousand steps") {
    const LinearSystem sys = benchmark_system(11);
    Rng rng(111);
    Matrix u(1, 10000);
    for (Eigen::Index t = 0; t < u.cols(); ++t) u(0, t) = rng.uniform(-5.0, 5.0);
    const TrajectoryBatch b = simulate(sys, Vector::Zero(2), u, {0.5, 3});
    REQUIRE(b.y.cwiseAbs().maxCoeff() < 1e3);
}

TEST_CASE("trajectory CSV carries the documented header") {
    const LinearSystem sys = benchmark_system(12);
    const TrajectoryBatch b = simulate(sys, Vector::Zero(2), Matrix::Zero(1, 3), {0.1, 2});
    std::ostringstream os;
    b.write_csv(os);
    REQUIRE(os.str().rfind("t,u_1,y_1,e_1\n", 0) == 0);
}

TEST_CASE("simulate validates shapes") {
    const LinearSystem sys = benchmark_system(13);
    REQUIRE_THROWS_AS(simulate(sys, Vector::Zero(3), Matrix::Zero(1, 5), {0.0, 0}), ShapeError);
    REQUIRE_THROWS_AS(simulate(sys, Vector::Zero(2), Matrix::Zero(2, 5), {0.0, 0}), ShapeError);
    REQUIRE_THROWS_AS(simulate(sys, Vector::Zero(2), Matrix::Zero(1, 0), {0.0, 0}), ShapeError);
}

#include <catch2/catch_amalgamated.hpp>
#include <random>

#include "gasket/energy.hpp"
#include "gasket/traceops.hpp"

using namespace gasket;

namespace {

Rational rq(long n, long d) { return Rational(n, d); }

GraphFunction<Rational> random_zero_boundary(int m, std::mt19937_64& rng) {
  std::uniform_int_distribution<long> num(-20, 20);
  std::uniform_int_distribution<long> den(1, 9);
  auto u = GraphFunction<Rational>::zero(m);
  for (size_t i = 3; i < u.values.size(); ++i) u.values[i] = Rational(num(rng), den(rng));
  return u;
}

// Conjugate-gradient oracle for the floating-mode Poisson solve, independent
// of the cell-tree elimination.
GraphFunction<double> cg_poisson(const PoissonProblem<double>& p) {
  const Mesh& mesh = Mesh::at_least(p.level);
  size_t n = mesh.vertex_count(p.level);
  // system: (4u - sum_nbr u) = -(2/3) 5^-L rhs at interior, u = g on boundary.
  std::vector<double> b(n, 0.0), x(n, 0.0);
  double unit = (2.0 / 3.0) * std::pow(5.0, -p.level);
  for (size_t i = 3; i < n; ++i) b[i] = -unit * p.rhs[i];
  x[0] = p.boundary[0];
  x[1] = p.boundary[1];
  x[2] = p.boundary[2];
  auto apply = [&](const std::vector<double>& v, std::vector<double>& out) {
    std::fill(out.begin(), out.end(), 0.0);
    for (const auto& cell : mesh.cells(p.level)) {
      double a = v[cell.v[0]], bb = v[cell.v[1]], c = v[cell.v[2]];
      out[cell.v[0]] += (a - bb) + (a - c);
      out[cell.v[1]] += (bb - a) + (bb - c);
      out[cell.v[2]] += (c - a) + (c - bb);
    }
    out[0] = out[1] = out[2] = 0.0;  // boundary rows frozen
  };
  std::vector<double> r(n), q(n), d(n);
  apply(x, r);
  for (size_t i = 3; i < n; ++i) r[i] = b[i] - r[i];
  r[0] = r[1] = r[2] = 0.0;
  d = r;
  double rho = 0;
  for (size_t i = 0; i < n; ++i) rho += r[i] * r[i];
  for (int it = 0; it < 20000 && rho > 1e-30; ++it) {
    apply(d, q);
    double dq = 0;
    for (size_t i = 0; i < n; ++i) dq += d[i] * q[i];
    double alpha = rho / dq;
    for (size_t i = 3; i < n; ++i) {
      x[i] += alpha * d[i];
      r[i] -= alpha * q[i];
    }
    double rho2 = 0;
    for (size_t i = 0; i < n; ++i) rho2 += r[i] * r[i];
    for (size_t i = 0; i < n; ++i) d[i] = r[i] + (rho2 / rho) * d[i];
    rho = rho2;
  }
  return GraphFunction<double>(p.level, std::move(x));
}

}  // namespace

TEST_CASE("discrete energies") {
  HarmonicFunction<Rational> h{{Rational(1), Rational(0), Rational(0)}};
  CHECK(energy(to_graph(h, 0)).value == Rational(2));
  CHECK(energy(to_graph(h, 1)).value == Rational(2));
  CHECK(energy(to_graph(h, 4)).value == Rational(2));

  auto c = to_graph(HarmonicFunction<Rational>{{rq(3, 7), rq(3, 7), rq(3, 7)}}, 3);
  CHECK(energy(c).value == Rational(0));

  SECTION("monotone under any refinement, constant only for the harmonic one") {
    std::mt19937_64 rng(5);
    auto u = random_zero_boundary(2, rng);
    auto e2 = energy(u).value;
    auto u3 = extend_once(u);
    CHECK(energy(u3).value == e2);
    u3.values.back() += 1;
    CHECK(energy(u3).value > e2);
  }
}

TEST_CASE("bilinear form") {
  HarmonicFunction<Rational> hu{{Rational(1), Rational(0), Rational(0)}};
  HarmonicFunction<Rational> hv{{Rational(0), Rational(1), Rational(0)}};
  auto u = to_graph(hu, 0);
  auto v = to_graph(hv, 0);
  CHECK(bilinear_energy(u, v) == Rational(-1));
  CHECK(bilinear_energy(u, u) == energy(u).value);

  SECTION("polarization identity, exactly") {
    std::mt19937_64 rng(7);
    for (int m : {1, 3}) {
      auto a = random_zero_boundary(m, rng);
      auto b = random_zero_boundary(m, rng);
      GraphFunction<Rational> sum = a, diff = a;
      for (size_t i = 0; i < a.values.size(); ++i) {
        sum.values[i] += b.values[i];
        diff.values[i] -= b.values[i];
      }
      CHECK(bilinear_energy(a, b) ==
            (energy(sum).value - energy(diff).value) / 4);
    }
  }

  SECTION("harmonic functions are energy-orthogonal to zero-boundary functions") {
    std::mt19937_64 rng(9);
    for (int m : {2, 4}) {
      auto h = to_graph(HarmonicFunction<Rational>{{rq(2, 3), rq(-1, 4), rq(5, 6)}}, m);
      auto v0 = random_zero_boundary(m, rng);
      CHECK(bilinear_energy(h, v0) == Rational(0));
    }
  }

  CHECK_THROWS_AS(bilinear_energy(to_graph(hu, 1), to_graph(hv, 2)), ContractError);
}

TEST_CASE("graph laplacian") {
  auto h = to_graph(HarmonicFunction<Rational>{{rq(1, 2), rq(-2, 3), rq(4, 5)}}, 4);
  const Mesh& mesh = Mesh::at_least(4);
  for (Mesh::Index i = 3; i < mesh.vertex_count(4); i += 11)
    CHECK(graph_laplacian(h, mesh.id_of(i)) == Rational(0));

  SECTION("tent at its own apex") {
    for (int m : {1, 2, 3}) {
      TentFunction t(apex_vertex(PairIndex(m, 1)));
      auto g = to_graph<Rational>(t, m);
      CHECK(graph_laplacian(g, t.apex) ==
            Rational(-6) * ratio_pow<Rational>(5, 1, m));
    }
  }

  SECTION("boundary vertex refused") {
    CHECK_THROWS_AS(graph_laplacian(h, VertexId{Word(), 0}), ContractError);
  }

  SECTION("batch agrees with pointwise") {
    std::mt19937_64 rng(13);
    auto u = random_zero_boundary(3, rng);
    auto all = graph_laplacian_all(u);
    const Mesh& m3 = Mesh::at_least(3);
    for (Mesh::Index i = 3; i < m3.vertex_count(3); ++i)
      CHECK(all[i] == graph_laplacian(u, m3.id_of(i)));
  }
}

TEST_CASE("discrete Gauss-Green identity") {
  std::mt19937_64 rng(21);
  for (int m : {2, 3, 4}) {
    auto u = random_zero_boundary(m, rng);
    auto v = random_zero_boundary(m, rng);
    auto lap = graph_laplacian_all(u);
    Rational rhs(0);
    Rational w = tent_measure<Rational>(m, false);
    for (size_t i = 3; i < v.values.size(); ++i) rhs += lap[i] * v.values[i] * w;
    CHECK(bilinear_energy(u, v) == -rhs);
  }
}

TEST_CASE("poisson solver") {
  SECTION("zero rhs reproduces the harmonic extension exactly") {
    PoissonProblem<Rational> p{3, {rq(1, 3), rq(-2, 7), Rational(2)},
                               std::vector<Rational>(Mesh::at_least(3).vertex_count(3))};
    auto u = poisson_solve(p);
    CHECK(u == to_graph(HarmonicFunction<Rational>{p.boundary}, 3));
  }

  SECTION("laplacian of the solution equals the rhs exactly") {
    std::mt19937_64 rng(31);
    std::uniform_int_distribution<long> num(-9, 9);
    std::uniform_int_distribution<long> den(1, 5);
    PoissonProblem<Rational> p{4, {Rational(1), Rational(0), rq(1, 2)}, {}};
    p.rhs.resize(Mesh::at_least(4).vertex_count(4));
    for (auto& v : p.rhs) v = Rational(num(rng), den(rng));
    auto u = poisson_solve(p);
    auto lap = graph_laplacian_all(u);
    for (size_t i = 3; i < p.rhs.size(); ++i) CHECK(lap[i] == p.rhs[i]);
    CHECK(u.values[0] == Rational(1));
    CHECK(u.values[1] == Rational(0));
    CHECK(u.values[2] == rq(1, 2));
  }

  SECTION("round trip: solve(laplacian of u, boundary of u) == u") {
    std::mt19937_64 rng(33);
    auto u = random_zero_boundary(4, rng);
    u.values[0] = rq(1, 9);
    u.values[1] = rq(-2, 5);
    u.values[2] = rq(3, 4);
    PoissonProblem<Rational> p{4, {u.values[0], u.values[1], u.values[2]},
                               graph_laplacian_all(u)};
    CHECK(poisson_solve(p) == u);
  }

  SECTION("symmetric data gives a symmetric solution") {
    auto u = poisson_solve(PoissonProblem<Rational>::constant_rhs(4, Rational(1)));
    CHECK(reflect_q0q2(u) == u);
    auto f = restrict_to_line(u);
    for (uint64_t k = 0; k <= 16; ++k) CHECK(f.samples[k] == f.samples[16 - k]);
  }

  SECTION("agrees with a conjugate-gradient oracle in floating mode") {
    auto p = PoissonProblem<double>::constant_rhs(5, 1.0, {0.25, -1.0, 0.5});
    auto direct = poisson_solve(p);
    auto cg = cg_poisson(p);
    double worst = 0;
    for (size_t i = 0; i < direct.values.size(); ++i)
      worst = std::max(worst, std::abs(direct.values[i] - cg.values[i]));
    CHECK(worst < 1e-10);
  }

  SECTION("gauss-green for rhs = 1: boundary flux sums to the total mass") {
    auto u = poisson_solve(PoissonProblem<double>::constant_rhs(10, 1.0));
    double flux = 0;
    for (int i = 0; i < 3; ++i)
      flux += normal_derivative(u, VertexId{Word(), i}, Direction::Boundary).fit.limit;
    CHECK(std::abs(flux - 1.0) < 1e-6);
  }
}

TEST_CASE("normal derivative readings") {
  SECTION("harmonic readings are constant and exact") {
    HarmonicFunction<Rational> h{{Rational(1), Rational(0), Rational(0)}};
    auto u = to_graph(h, 8);
    auto q0 = normal_derivative(u, VertexId{Word(), 0}, Direction::Boundary);
    for (const auto& t : q0.terms) CHECK(t == Rational(2));
    CHECK(q0.fit.limit == Rational(2));
    auto q1 = normal_derivative(u, VertexId{Word(), 1}, Direction::Boundary);
    CHECK(q1.fit.limit == Rational(-1));
  }

  SECTION("constant function has zero readings in every direction") {
    auto u = to_graph(HarmonicFunction<Rational>{{Rational(3), Rational(3), Rational(3)}}, 6);
    for (auto dir : {Direction::Up, Direction::Left, Direction::Right}) {
      VertexId x = vertex_of_dyadic(DyadicPoint(1, 1));
      if (dir == Direction::Up) x = apex_vertex(PairIndex(1, 1));
      if (dir == Direction::Left && !twin_address(x)) continue;
      auto r = normal_derivative(u, x, dir);
      for (const auto& t : r.terms) CHECK(t == Rational(0));
    }
  }

  SECTION("direction availability") {
    auto u = to_graph(HarmonicFunction<Rational>{{Rational(1), Rational(0), Rational(0)}}, 5);
    CHECK_THROWS_AS(normal_derivative(u, VertexId{Word(), 1}, Direction::Up), ContractError);
    CHECK_NOTHROW(normal_derivative(u, vertex_of_dyadic(DyadicPoint(1, 1)), Direction::Right));
    CHECK_NOTHROW(normal_derivative(u, vertex_of_dyadic(DyadicPoint(1, 1)), Direction::Left));
    CHECK_NOTHROW(normal_derivative(u, apex_vertex(PairIndex(2, 2)), Direction::Up));
  }

  SECTION("localized matching: harmonic satisfies it exactly at line junctions") {
    auto u = to_graph(HarmonicFunction<Rational>{{rq(1, 3), Rational(2), rq(-1, 2)}}, 9);
    for (auto x : {DyadicPoint(1, 1), DyadicPoint(2, 1), DyadicPoint(3, 5)}) {
      auto right = normal_derivative(u, vertex_of_dyadic(x), Direction::Right);
      auto left = normal_derivative(u, vertex_of_dyadic(x), Direction::Left);
      CHECK(right.fit.limit + left.fit.limit == Rational(0));
    }
  }
}

TEST_CASE("line-sample one-sided derivative") {
  HarmonicFunction<Rational> h{{Rational(1), Rational(0), Rational(0)}};
  auto f = restrict_to_line(h, 10);

  SECTION("harmonic restriction: constant terms equal to the boundary derivative") {
    auto r = one_sided_derivative(f, DyadicPoint(0, 0), Side::Left);
    for (const auto& t : r.terms) CHECK(t == Rational(-1));
    CHECK(r.fit.limit == Rational(-1));
  }

  SECTION("constant restriction gives zero") {
    LineFunction<Rational> c(6, std::vector<Rational>(65, rq(9, 2)));
    auto r = one_sided_derivative(c, DyadicPoint(2, 1), Side::Right);
    for (const auto& t : r.terms) CHECK(t == Rational(0));
  }

  SECTION("linear function tends to zero") {
    std::vector<Rational> s(1 << 10 | 1);
    for (uint64_t k = 0; k < s.size(); ++k) s[k] = Rational(k, uint64_t(1) << 10);
    LineFunction<Rational> lin(10, s);
    auto r = one_sided_derivative(lin, DyadicPoint(0, 0), Side::Left);
    // terms are -(3/2)(5/6)^m
    CHECK(r.terms[0] == rq(-3, 2));
    CHECK(r.terms[1] == rq(-3, 2) * rq(5, 6));
    CHECK(std::abs(to_double(r.fit.limit)) < 1e-6);
  }

  SECTION("agrees with the gasket-side localized reading for computed functions") {
    auto u = poisson_solve(PoissonProblem<double>::constant_rhs(11, 1.0));
    auto fu = restrict_to_line(u);
    DyadicPoint x(2, 1);
    auto line_side = one_sided_derivative(fu, x, Side::Right);
    auto gasket_side = normal_derivative(u, vertex_of_dyadic(x), Direction::Right);
    CHECK(std::abs(line_side.fit.limit - gasket_side.fit.limit) < 1e-5);
  }

  SECTION("edge contracts") {
    CHECK_THROWS_AS(one_sided_derivative(f, DyadicPoint(0, 0), Side::Right), ContractError);
    CHECK_THROWS_AS(one_sided_derivative(f, DyadicPoint(0, 1), Side::Left), ContractError);
  }
}

TEST_CASE("riesz representer") {
  SECTION("defining identity, exactly, for random zero-boundary functions") {
    std::mt19937_64 rng(41);
    int m = 5;
    auto J = riesz_representer<Rational>(m, RieszFunctional::Dtilde11);
    CHECK(J.values[0] == Rational(0));
    CHECK(J.values[1] == Rational(0));
    CHECK(J.values[2] == Rational(0));
    for (int t = 0; t < 20; ++t) {
      auto v = random_zero_boundary(m, rng);
      auto fv = restrict_to_line(v);
      CHECK(bilinear_energy(v, J) == -diff_Dtilde(fv, 1, 1));
    }
    auto J12 = riesz_representer<Rational>(m, RieszFunctional::Dtilde12);
    auto J22 = riesz_representer<Rational>(m, RieszFunctional::D22);
    for (int t = 0; t < 5; ++t) {
      auto v = random_zero_boundary(m, rng);
      auto fv = restrict_to_line(v);
      CHECK(bilinear_energy(v, J12) == -diff_Dtilde(fv, 1, 2));
      CHECK(bilinear_energy(v, J22) == -diff_D(fv, 2, 2));
    }
  }

  SECTION("harmonic functions pair to zero") {
    int m = 4;
    auto J = riesz_representer<Rational>(m, RieszFunctional::Dtilde11);
    auto h = to_graph(HarmonicFunction<Rational>{{rq(5, 3), rq(-1, 2), rq(2, 7)}}, m);
    CHECK(diff_Dtilde(restrict_to_line(h), 1, 1) == Rational(0));
    CHECK(bilinear_energy(h, J) == Rational(0));
  }
}

TEST_CASE("quadrature weights") {
  SECTION("total mass one") {
    for (int m : {0, 1, 4}) {
      auto one = to_graph(HarmonicFunction<Rational>{{Rational(1), Rational(1), Rational(1)}}, m);
      CHECK(integrate(one) == Rational(1));
    }
  }
  SECTION("harmonic integrals are level-independent (piecewise interpolation exactness)") {
    HarmonicFunction<Rational> h{{Rational(1), Rational(0), Rational(0)}};
    auto v3 = integrate(to_graph(h, 3));
    auto v6 = integrate(to_graph(h, 6));
    CHECK(v3 == v6);
    CHECK(v3 == rq(1, 3));  // each boundary basis function has mass 1/3
  }
}

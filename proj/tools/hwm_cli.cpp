// Command-line driver: validates datum files, tabulates the explicit
// solution on (t, x) grids, tracks poles and conserved traces, compares the
// formula against the brute-force integrator, and generates solvable data.
// All tables are CSV with a header row and 17-significant-digit floats, so
// identical inputs give byte-identical outputs.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hwm/datagen.hpp"
#include "hwm/io.hpp"
#include "hwm/ode_oracle.hpp"

namespace {

using namespace hwm;

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

struct RunConfig {
  std::string input;
  std::string out = "-";
  double t0 = 0, t1 = 1;
  int nt = 11;
  double xmin = -10, xmax = 10;
  int nx = 201;
  double h = 1e-3;
  double tol = kDefaultTol;
  bool force = false;
  std::uint64_t seed = 0;
  int kmax = 0;  // 0: pick 2N
  int n = 1;
  double phase = 0;
  std::vector<double> pole{0.0, 1.0};
  std::vector<double> m0{0.0, 0.0, 1.0};
  std::vector<double> poles;  // flattened re, im pairs for soliton-gen
};

class Output {
 public:
  explicit Output(const std::string& path) {
    if (path != "-") {
      file_.open(path);
      if (!file_) throw Error("cannot open output file: " + path);
    }
  }
  std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }

 private:
  std::ofstream file_;
};

std::vector<double> linspace(double lo, double hi, int n) {
  if (n < 1) throw Error("grid needs at least one point");
  if (lo > hi) throw Error("grid bounds are reversed");
  std::vector<double> v;
  if (n == 1) {
    v.push_back(lo);
    return v;
  }
  for (int i = 0; i < n; ++i) v.push_back(lo + (hi - lo) * i / (n - 1));
  return v;
}

RationalData load_checked(const RunConfig& cfg, int& exit_code) {
  const RationalData d = load_datum(cfg.input);
  const ConstraintReport rep = validate(d, cfg.tol);
  exit_code = 0;
  if (!rep.valid) {
    std::cerr << "validation failed: max site residual " << rep.max_site_residual() << "\n";
    if (!cfg.force) {
      exit_code = 2;
      return d;
    }
    std::cerr << "continuing because --force was given\n";
  }
  return d;
}

int cmd_validate(const RunConfig& cfg) {
  const RationalData d = load_datum(cfg.input);
  const ConstraintReport rep = validate(d, cfg.tol);
  Output out(cfg.out);
  std::ostream& os = out.stream();
  os << "key,value\n";
  os << "valid," << (rep.valid ? 1 : 0) << "\n";
  os << "sites," << rep.sites.size() << "\n";
  os << "tol," << fmt(rep.tol) << "\n";
  os << "m0_unit_residual," << fmt(rep.m0_unit_residual) << "\n";
  os << "m0_trace_residual," << fmt(rep.m0_trace_residual) << "\n";
  os << "m0_hermitian_residual," << fmt(rep.m0_hermitian_residual) << "\n";
  os << "pole_separation," << fmt(rep.pole_separation) << "\n";
  os << "pole_min_imag," << fmt(rep.pole_min_imag) << "\n";
  for (std::size_t j = 0; j < rep.sites.size(); ++j) {
    const auto& s = rep.sites[j];
    const std::string p = "site" + std::to_string(j) + "_";
    os << p << "spin_norm," << fmt(s.spin_norm) << "\n";
    os << p << "null_residual," << fmt(s.null_residual) << "\n";
    os << p << "anticomm_residual," << fmt(s.anticomm_residual) << "\n";
    os << p << "eigen_residual," << fmt(s.eigen_residual) << "\n";
    os << p << "re_velocity," << fmt(s.velocity.real()) << "\n";
    os << p << "im_velocity," << fmt(s.velocity.imag()) << "\n";
  }
  return rep.valid || cfg.force ? 0 : 2;
}

int cmd_evolve(const RunConfig& cfg) {
  int code = 0;
  const RationalData d = load_checked(cfg, code);
  if (code != 0) return code;
  FrozenEvolution fe;
  if (cfg.force) {
    Eigen::VectorXcd vel(d.size());
    for (int j = 0; j < d.size(); ++j) vel(j) = velocity_projection(d, j);
    fe = FrozenEvolution::freeze_with_velocities(d, vel, 1e-3);
  } else {
    fe = FrozenEvolution::freeze(d, cfg.tol);
  }

  Output out(cfg.out);
  std::ostream& os = out.stream();
  os << "t,x,m1,m2,m3,norm_dev,im_residual\n";
  const double nan = std::numeric_limits<double>::quiet_NaN();
  int flagged = 0;
  for (double t : linspace(cfg.t0, cfg.t1, cfg.nt)) {
    for (double x : linspace(cfg.xmin, cfg.xmax, cfg.nx)) {
      os << fmt(t) << ',' << fmt(x) << ',';
      try {
        const FieldSample s = full_field(fe, t, x);
        os << fmt(s.m.x()) << ',' << fmt(s.m.y()) << ',' << fmt(s.m.z()) << ','
           << fmt(s.unit_deviation) << ',' << fmt(s.im_residual) << "\n";
      } catch (const Error&) {
        ++flagged;
        os << fmt(nan) << ',' << fmt(nan) << ',' << fmt(nan) << ',' << fmt(nan) << ','
           << fmt(nan) << "\n";
      }
    }
  }
  if (flagged > 0) std::cerr << flagged << " grid points flagged (singular or non-real)\n";
  return 0;
}

int cmd_poles(const RunConfig& cfg) {
  int code = 0;
  const RationalData d = load_checked(cfg, code);
  if (code != 0) return code;
  const FrozenEvolution fe = FrozenEvolution::freeze(d, cfg.tol);
  const int n = d.size();

  Output out(cfg.out);
  std::ostream& os = out.stream();
  os << "t,j,re_x,im_x,re_s1,im_s1,re_s2,im_s2,re_s3,im_s3,conditioning\n";
  Eigen::VectorXcd previous = fe.poles;
  bool warned = false;
  for (double t : linspace(cfg.t0, cfg.t1, cfg.nt)) {
    const PoleSnapshot snap = poles_and_spins_at(fe, t);
    if (snap.boundary_warning && !warned) {
      std::cerr << "warning: a pole is close to the real axis near t = " << t << "\n";
      warned = true;
    }
    const std::vector<int> pick = match_by_proximity(previous, snap.poles);
    for (int j = 0; j < n; ++j) {
      const Complex xj = snap.poles(pick[j]);
      const Mat2& a = snap.spins[pick[j]];
      const Complex s1 = (a(0, 1) + a(1, 0)) / 2.0;
      const Complex s2 = (a(1, 0) - a(0, 1)) / (2.0 * kImag);
      const Complex s3 = (a(0, 0) - a(1, 1)) / 2.0;
      os << fmt(t) << ',' << j << ',' << fmt(xj.real()) << ',' << fmt(xj.imag()) << ','
         << fmt(s1.real()) << ',' << fmt(s1.imag()) << ',' << fmt(s2.real()) << ','
         << fmt(s2.imag()) << ',' << fmt(s3.real()) << ',' << fmt(s3.imag()) << ','
         << fmt(snap.conditioning) << "\n";
      previous(j) = xj;
    }
  }
  return 0;
}

int cmd_conserved(const RunConfig& cfg) {
  int code = 0;
  const RationalData d = load_checked(cfg, code);
  if (code != 0) return code;
  const int kmax = cfg.kmax > 0 ? cfg.kmax : 2 * d.size();

  const auto traj = integrate_halfspin(d, cfg.t1, cfg.h, cfg.tol);
  const LaxPair lp0 = lax_from_parts(traj.front().x, traj.front().v, traj.front().pairs);
  const std::vector<Complex> base = conserved_traces(lp0.L, kmax);
  std::vector<double> drift(kmax, 0.0);
  for (const HalfSpinState& st : traj) {
    const LaxPair lp = lax_from_parts(st.x, st.v, st.pairs);
    const std::vector<Complex> tr = conserved_traces(lp.L, kmax);
    for (int k = 0; k < kmax; ++k)
      drift[k] = std::max(drift[k], std::abs(tr[k] - base[k]));
  }

  Output out(cfg.out);
  std::ostream& os = out.stream();
  os << "k,re_trace,im_trace,drift\n";
  for (int k = 0; k < kmax; ++k)
    os << (k + 1) << ',' << fmt(base[k].real()) << ',' << fmt(base[k].imag()) << ','
       << fmt(drift[k]) << "\n";
  return 0;
}

int cmd_oracle_compare(const RunConfig& cfg) {
  int code = 0;
  const RationalData d = load_checked(cfg, code);
  if (code != 0) return code;
  const FrozenEvolution fe = FrozenEvolution::freeze(d, cfg.tol);
  const auto traj = integrate_spin_cm(d, cfg.t1, cfg.h, cfg.tol);
  const std::vector<double> xs = linspace(cfg.xmin, cfg.xmax, cfg.nx);
  const int stride =
      std::max<int>(1, static_cast<int>(traj.states.size() - 1) / std::max(1, cfg.nt - 1));
  const CompareReport rep = compare(fe, traj.states, xs, stride);

  Output out(cfg.out);
  std::ostream& os = out.stream();
  os << "t,sup_err,pole_err,spin_err\n";
  for (const CompareRow& row : rep.rows)
    os << fmt(row.t) << ',' << fmt(row.field_err) << ',' << fmt(row.pole_err) << ','
       << fmt(row.spin_err) << "\n";
  std::cerr << "richardson error estimate: " << traj.richardson_error << "\n";
  return 0;
}

int cmd_soliton_gen(const RunConfig& cfg) {
  if (static_cast<int>(cfg.m0.size()) != 3) throw Error("--m0 needs three components");
  const ComplexSpin m0{cfg.m0[0], cfg.m0[1], cfg.m0[2]};

  RationalData d;
  if (cfg.n == 1) {
    d = single_soliton(Complex(cfg.pole[0], cfg.pole[1]), m0, cfg.phase);
  } else {
    std::mt19937_64 rng(cfg.seed);
    std::vector<Complex> poles;
    if (!cfg.poles.empty()) {
      if (static_cast<int>(cfg.poles.size()) != 2 * cfg.n)
        throw Error("--poles needs 2 n numbers (re, im per pole)");
      for (int j = 0; j < cfg.n; ++j) poles.emplace_back(cfg.poles[2 * j], cfg.poles[2 * j + 1]);
    } else {
      poles = random_poles(rng, cfg.n);
    }
    d = solve_constraints(poles, m0, rng);
  }

  const ConstraintReport rep = validate(d, cfg.tol);
  std::cerr << "generated datum: n = " << d.size()
            << ", max site residual = " << rep.max_site_residual() << "\n";
  Output out(cfg.out);
  write_datum(out.stream(), d);
  return rep.valid ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"rational half-wave maps: explicit resolvent solution and checks"};
  app.require_subcommand(1);
  RunConfig cfg;

  app.set_help_flag("--help", "print help");

  auto add_common = [&cfg](CLI::App* sub, bool with_input) {
    sub->set_help_flag("--help", "print help");
    if (with_input) sub->add_option("input", cfg.input, "datum file (JSON)")->required();
    sub->add_option("--out", cfg.out, "output path, - for stdout");
    sub->add_option("--tol", cfg.tol, "tolerance for validation predicates");
    sub->add_flag("--force", cfg.force, "continue past validation failures");
    return sub;
  };

  CLI::App* validate_cmd = add_common(app.add_subcommand("validate", "check a datum file"), true);

  CLI::App* evolve = add_common(
      app.add_subcommand("evolve", "tabulate the field on a (t, x) grid"), true);
  evolve->add_option("--t0", cfg.t0);
  evolve->add_option("--t1", cfg.t1);
  evolve->add_option("--nt", cfg.nt);
  evolve->add_option("--xmin", cfg.xmin);
  evolve->add_option("--xmax", cfg.xmax);
  evolve->add_option("--nx", cfg.nx);

  CLI::App* poles = add_common(
      app.add_subcommand("poles", "pole and residue snapshots over time"), true);
  poles->add_option("--t0", cfg.t0);
  poles->add_option("--t1", cfg.t1);
  poles->add_option("--nt", cfg.nt);

  CLI::App* conserved = add_common(
      app.add_subcommand("conserved", "Lax traces and their drift along the flow"), true);
  conserved->add_option("--t1", cfg.t1);
  conserved->add_option("--h", cfg.h, "integration step");
  conserved->add_option("--kmax", cfg.kmax, "highest trace power (default 2N)");

  CLI::App* oracle = add_common(
      app.add_subcommand("oracle-compare", "explicit formula vs brute-force integration"), true);
  oracle->add_option("--t1", cfg.t1);
  oracle->add_option("--nt", cfg.nt);
  oracle->add_option("--xmin", cfg.xmin);
  oracle->add_option("--xmax", cfg.xmax);
  oracle->add_option("--nx", cfg.nx);
  oracle->add_option("--h", cfg.h, "integration step");

  CLI::App* gen = add_common(
      app.add_subcommand("soliton-gen", "generate a constraint-valid datum"), false);
  gen->add_option("--n", cfg.n, "number of poles");
  gen->add_option("--seed", cfg.seed, "random seed for the multi-pole search");
  gen->add_option("--pole", cfg.pole, "pole of the one-pole datum: re im")->expected(2);
  gen->add_option("--poles", cfg.poles, "fixed poles for n >= 2: re im per pole");
  gen->add_option("--phase", cfg.phase, "spin phase of the one-pole datum");
  gen->add_option("--m0", cfg.m0, "background unit vector")->expected(3);

  CLI11_PARSE(app, argc, argv);

  try {
    if (app.got_subcommand(validate_cmd)) return cmd_validate(cfg);
    if (app.got_subcommand(evolve)) return cmd_evolve(cfg);
    if (app.got_subcommand(poles)) return cmd_poles(cfg);
    if (app.got_subcommand(conserved)) return cmd_conserved(cfg);
    if (app.got_subcommand(oracle)) return cmd_oracle_compare(cfg);
    if (app.got_subcommand(gen)) return cmd_soliton_gen(cfg);
  } catch (const SchemaError& e) {
    std::cerr << "schema error: " << e.what() << "\n";
    return 1;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

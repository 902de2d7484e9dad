#include "opext/instance_io.hpp"
#include "opext/random.hpp"
#include "opext/spectral.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <iomanip>
#include <iostream>
#include <sstream>

using namespace opext;
using nlohmann::json;

namespace {

struct Check {
    std::string name;
    bool pass;
    double residual;
    std::string tag;
    bool skipped = false;
};

Check skip(const std::string& name, const std::string& tag) { return {name, true, 0.0, tag, true}; }

bool dilation_available(const InstanceFile& inst, const TolPolicy& tol) {
    return inst.exit && inst.model(tol).big_op.everywhere_defined();
}

struct Options {
    std::string instance;
    std::string out;
    std::string suite = "all";
    std::string kind = "isometric";
    long n = 2, d = 1, m = 1, de = 0;
    std::uint64_t seed = 0;
    bool seed_given = false;
    int grid = 64;
    double abs_floor = 1e-10;
    double rank_rel = 0.0;
    double epsilon = 0.1;
    std::vector<std::string> at;
    std::vector<double> arc;
    std::vector<double> interval;
};

// rounding in R^{-1} grows like |lambda|^2; increases below this are noise
constexpr double kPhiSlack = 1e-9;

TolPolicy tol_of(const Options& o) { return {o.abs_floor, o.rank_rel}; }

cplx parse_point(const std::string& s) {
    std::stringstream ss(s);
    double re = 0, im = 0;
    char comma = 0;
    ss >> re;
    if (ss >> comma) ss >> im;
    if (ss.fail() || (comma != 0 && comma != ',')) throw std::invalid_argument("points are given as re,im");
    return {re, im};
}

// anchor of the symmetric side
cplx anchor_of(const InstanceFile& inst) {
    if (inst.exit) return inst.exit->point;
    if (inst.parameter) return inst.parameter->anchor;
    return kI;
}

ResolventModel resolvent_of(const InstanceFile& inst, const TolPolicy& tol) {
    if (inst.exit) return dilation_model(inst.model(tol), tol);
    if (!inst.parameter) throw PreconditionViolated("instance carries neither an exit block nor a parameter");
    const CMatrix& k = inst.parameter->k;
    if (inst.kind == InstanceFile::Kind::isometric) {
        IsometryOp v = inst.isometry();
        auto p = ContractionParam::constant(defect_subspaces(v, Point(0.0), tol).n_space,
                                            defect_subspaces(v, Point::inf(), tol).n_space, k);
        return chumakin_model(v, p, tol);
    }
    LinOp a = inst.symmetric();
    cplx l0 = inst.parameter->anchor;
    auto p = ContractionParam::constant(defect_subspaces(a, l0, tol).n_space,
                                        defect_subspaces(a, std::conj(l0), tol).n_space, k);
    return shtraus_model(a, p, l0, tol);
}

SpectralAtoms atoms_of(const InstanceFile& inst, const TolPolicy& tol) {
    if (inst.exit) return spectral_measure(inst.model(tol), tol);
    if (!inst.parameter) throw PreconditionViolated("instance carries neither an exit block nor a parameter");
    if (inst.kind == InstanceFile::Kind::isometric)
        return spectral_measure(inst.isometry().ambient() + inst.parameter->k, NormalKind::unitary, tol);
    LinOp a = inst.symmetric();
    cplx l0 = inst.parameter->anchor;
    Subspace nz = defect_subspaces(a, l0, tol).n_space;
    LinOp b = neumann_extension(a, l0, PartialMap::from_ambient(nz, inst.parameter->k), tol).op;
    return spectral_measure(b.ambient(), NormalKind::hermitian, tol);
}

std::vector<cplx> disk_samples(Rng& rng, int count) {
    static const double radii[] = {0.2, 0.5, 0.8, 1.25, 2.0, 5.0};
    std::vector<cplx> out;
    for (int k = 0; k < count; ++k) out.push_back(std::polar(radii[k % 6], random_uniform(rng, 0.0, 2 * kPi)));
    return out;
}

std::vector<cplx> plane_samples(Rng& rng, int count) {
    std::vector<cplx> out;
    for (int k = 0; k < count; ++k) {
        double im = random_uniform(rng, 0.2, 3.0) * (k % 2 == 0 ? 1.0 : -1.0);
        out.push_back({random_uniform(rng, -3.0, 3.0), im});
    }
    return out;
}

void suite_axioms(const InstanceFile& inst, Rng& rng, const TolPolicy& tol, std::vector<Check>& out) {
    if (inst.exit && !dilation_available(inst, tol)) {
        out.push_back(skip("axioms_extension_not_selfadjoint", "cli"));
        return;
    }
    ResolventModel r = resolvent_of(inst, tol);
    IsometryOp v;
    if (inst.kind == InstanceFile::Kind::isometric) {
        v = inst.isometry();
    } else {
        cplx z = anchor_of(inst);
        v = cayley_transform(inst.symmetric(), z, tol);
        r = cayley_transfer_model(r, z, TransferDirection::sym_to_iso);
    }
    AxiomReport rep = verify_resolvent_axioms(r, v, disk_samples(rng, 12));
    for (const auto& a : rep.axioms) out.push_back({"axiom_" + a.name, a.pass, a.residual, "resolvents"});
}

void suite_oracle(const InstanceFile& inst, Rng& rng, const TolPolicy& tol, std::vector<Check>& out) {
    if (!inst.exit) {
        out.push_back(skip("oracle_needs_exit_block", "cli"));
        return;
    }
    ExitSpaceModel model = inst.model(tol);
    if (!model.big_op.everywhere_defined()) {
        // symmetric but not self-adjoint in the larger space: only the compression is checked
        double dist = 0.0;
        bool ok = true;
        try {
            (void)compressed_extension(model, tol);
        } catch (const OpextError&) {
            ok = false;
            dist = 1.0;
        }
        out.push_back({"compressed_extension", ok, dist, "extensions"});
        return;
    }
    ResolventModel r = dilation_model(model, tol);
    double worst = 0.0;
    std::vector<cplx> samples;
    if (inst.kind == InstanceFile::Kind::isometric) {
        IsometryOp v = inst.isometry();
        ResolventModel ch = chumakin_model(v, recovered_parameter(r, v, tol), tol);
        samples = disk_samples(rng, 12);
        for (cplx p : samples) worst = std::max(worst, (ch(p) - r(p)).norm());
        out.push_back({"chumakin_vs_dilation", worst < 1e-9, worst, "resolvents"});
    } else {
        LinOp a = inst.symmetric();
        cplx z = anchor_of(inst);
        ResolventModel sh = shtraus_model(a, frak_F_param(r, a, z, tol), z, tol);
        samples = plane_samples(rng, 12);
        for (cplx p : samples) worst = std::max(worst, (sh(p) - r(p)).norm());
        out.push_back({"shtraus_vs_dilation", worst < 1e-9, worst, "resolvents"});
        LinOp big_a = direct_sum_ops(a, *model.exit_sym);
        // the representation needs T on the whole defect space
        if (model.t->is_isometric(1e-9) && model.t->src.dim() == defect_subspaces(big_a, z, tol).n_space.dim()) {
            BlockParam t = BlockParam::split(model.t->ambient(), a.n);
            double wc = 0.0;
            for (cplx p : samples) {
                if (p.imag() * z.imag() <= 0) continue;
                wc = std::max(wc, (frak_F_via_char(t, *model.exit_sym, z, p, tol) - frak_F(r, a, z, p, tol)).norm());
            }
            out.push_back({"characteristic_representation", wc < 1e-9, wc, "resolvents"});
        }
    }
    SpectralAtoms atoms = spectral_measure(model, tol);
    double ir = verify_integral_representation(atoms, r, samples);
    out.push_back({"integral_representation", ir < 1e-10 * std::max(1.0, model.big_op.action.norm()), ir,
                   "spectral"});
}

void suite_gap(const InstanceFile& inst, Rng& rng, int grid, const TolPolicy& tol, std::vector<Check>& out) {
    if (inst.exit && !dilation_available(inst, tol)) {
        out.push_back(skip("gap_extension_not_selfadjoint", "cli"));
        return;
    }
    SpectralAtoms atoms = atoms_of(inst, tol);
    for (int trial = 0; trial < 3; ++trial) {
        std::string name = "gap_region_" + std::to_string(trial);
        try {
            GapReport rep;
            if (inst.kind == InstanceFile::Kind::isometric) {
                double t1 = random_uniform(rng, 0.0, 2 * kPi), t2 = random_uniform(rng, 0.0, 2 * kPi);
                if (t1 > t2) std::swap(t1, t2);
                IsometryOp v = inst.isometry();
                ContractionParam p =
                    inst.exit ? continued_parameter(dilation_model(inst.model(tol), tol), v, tol)
                              : ContractionParam::constant(defect_subspaces(v, Point(0.0), tol).n_space,
                                                           defect_subspaces(v, Point::inf(), tol).n_space,
                                                           inst.parameter->k);
                rep = gap_report(v, p, ArcSpec::arc(t1, t2), grid, atoms, tol);
            } else {
                double a1 = random_uniform(rng, -3.0, 3.0), a2 = random_uniform(rng, -3.0, 3.0);
                if (a1 > a2) std::swap(a1, a2);
                LinOp a = inst.symmetric();
                cplx z = anchor_of(inst);
                ContractionParam p =
                    inst.exit ? continued_parameter(dilation_model(inst.model(tol), tol), a, z, tol)
                              : ContractionParam::constant(defect_subspaces(a, z, tol).n_space,
                                                           defect_subspaces(a, std::conj(z), tol).n_space,
                                                           inst.parameter->k);
                rep = gap_report(a, p, z, ArcSpec::interval(a1, a2), grid, atoms, tol);
            }
            out.push_back({name, rep.agrees, 0.0, "spectral"});
        } catch (const NotRegularType& e) {
            // a non-regular point inside the region is spectrum of the operator itself
            bool has_atoms = false;
            for (const auto& at : atoms.atoms)
                has_atoms = has_atoms || std::abs(at.location - (inst.kind == InstanceFile::Kind::isometric
                                                                      ? angle_of(e.point)
                                                                      : e.point.real())) < 1e-6;
            out.push_back({name + "_not_regular_type", has_atoms, 0.0, "spectral"});
        } catch (const PreconditionViolated& e) {
            out.push_back({name + "_side_condition", false, 0.0, "spectral"});
        }
    }
}

void suite_limits(const InstanceFile& inst, double epsilon, const TolPolicy& tol, std::vector<Check>& out) {
    if (inst.kind != InstanceFile::Kind::symmetric || !dilation_available(inst, tol)) {
        out.push_back(skip("limits_not_applicable", "cli"));
        return;
    }
    LinOp a = inst.symmetric();
    cplx z = anchor_of(inst);
    RaySpec ray = RaySpec::powers_of_ten(z, 1, 6, epsilon);
    PhiInfinityReport rep = phi_infinity(a, inst.model(tol), z, ray, tol);
    bool mono = true;
    double final_err = 0.0;
    for (const auto& e : rep.errors) {
        for (std::size_t k = 2; k < e.size(); ++k)
            if (e[k] > e[k - 1] + kPhiSlack) mono = false;
        final_err = std::max(final_err, e.back());
    }
    out.push_back({"phi_infinity_monotone", mono, 0.0, "resolvents"});
    out.push_back({"phi_infinity_final_error", final_err < 1e-3, final_err, "resolvents"});
}

json report_json(const std::string& suite, const std::vector<Check>& checks) {
    json j;
    j["suite"] = suite;
    json arr = json::array();
    int passed = 0;
    for (const auto& c : checks) {
        arr.push_back({{"name", c.name},
                       {"pass", c.pass},
                       {"status", c.skipped ? "skip" : (c.pass ? "pass" : "fail")},
                       {"residual", c.residual},
                       {"tag", c.tag}});
        passed += c.pass ? 1 : 0;
    }
    j["checks"] = arr;
    j["summary"] = {{"passed", passed}, {"failed", static_cast<int>(checks.size()) - passed},
                    {"total", static_cast<int>(checks.size())}};
    return j;
}

void emit(const Options& o, const std::string& text) {
    if (o.out.empty())
        std::cout << text;
    else
        write_file_atomic(o.out, text);
}

std::string fmt(double x) {
    std::ostringstream ss;
    ss << std::setprecision(12) << x;
    return ss.str();
}

int cmd_gen(const Options& o) {
    if (o.d < 0 || o.d > o.n || o.m < 0 || o.n < 1) throw std::invalid_argument("need 0 <= d <= n, n >= 1, m >= 0");
    Rng rng(o.seed);
    InstanceFile inst;
    inst.ambient_dim = o.n;
    inst.seed = o.seed;
    InstanceFile::Exit e;
    e.dim = o.m;
    if (o.kind == "isometric") {
        inst.kind = InstanceFile::Kind::isometric;
        IsometryOp v = random_isometry_op(o.n, o.d, rng);
        inst.domain_basis = v.dom.basis;
        inst.action_or_range = v.ran;
        ExitSpaceModel model = random_unitary_model(v, o.m, rng);
        e.t = model.big() - direct_sum_ops(v, IsometryOp::zero(o.m)).ambient();
    } else if (o.kind == "symmetric") {
        inst.kind = InstanceFile::Kind::symmetric;
        if (o.d == o.n && o.m == 0) std::cerr << "warning: self-adjoint, defects (0,0)\n";
        else if (o.d == o.n) std::cerr << "warning: self-adjoint, defects (0,0) in H\n";
        SymmetricOp a = random_symmetric_op(o.n, o.d, rng);
        inst.domain_basis = a.dom.basis;
        inst.action_or_range = a.action;
        if (o.de < 0 || o.de > o.m) throw std::invalid_argument("need 0 <= exit domain dimension <= m");
        ExitSpaceModel model = random_hermitian_model(a, o.m, o.de, kI, rng, tol_of(o));
        e.point = kI;
        e.t = model.t->ambient();
        if (o.de > 0) {
            e.domain_basis = model.exit_sym->dom.basis;
            e.action = model.exit_sym->action;
        }
    } else {
        throw std::invalid_argument("kind must be isometric or symmetric");
    }
    inst.exit = e;
    // round trip through the parser checks the written instance
    std::string text = dump_instance(inst);
    InstanceFile back = parse_instance(text);
    (void)back.model(tol_of(o));
    emit(o, text);
    return 0;
}

int cmd_verify(const Options& o) {
    InstanceFile inst = load_instance(o.instance);
    TolPolicy tol = tol_of(o);
    Rng rng(o.seed_given ? o.seed : inst.seed);
    std::vector<Check> checks;
    const std::string& s = o.suite;
    if (s != "axioms" && s != "oracle" && s != "gap" && s != "limits" && s != "all")
        throw std::invalid_argument("suite must be axioms, oracle, gap, limits or all");
    if (s == "axioms" || s == "all") suite_axioms(inst, rng, tol, checks);
    if (s == "oracle" || s == "all") suite_oracle(inst, rng, tol, checks);
    if (s == "gap" || s == "all") suite_gap(inst, rng, o.grid, tol, checks);
    if (s == "limits" || s == "all") suite_limits(inst, o.epsilon, tol, checks);

    std::ostringstream text;
    bool ok = true;
    for (const auto& c : checks) {
        text << std::left << std::setw(36) << c.name << (c.skipped ? "SKIP" : c.pass ? "PASS" : "FAIL") << "  " << fmt(c.residual) << "  "
             << c.tag << "\n";
        ok = ok && c.pass;
    }
    text << (ok ? "all checks passed" : "some checks failed") << "\n";
    std::cout << text.str();
    if (!o.out.empty()) write_file_atomic(o.out, report_json(s, checks).dump(2) + "\n");
    return ok ? 0 : 1;
}

int cmd_resolvent(const Options& o) {
    InstanceFile inst = load_instance(o.instance);
    TolPolicy tol = tol_of(o);
    ResolventModel r = resolvent_of(inst, tol);
    std::vector<cplx> pts;
    for (const auto& s : o.at) pts.push_back(parse_point(s));
    if (pts.empty()) {
        for (int k = 0; k < o.grid; ++k) {
            if (inst.kind == InstanceFile::Kind::isometric)
                pts.push_back(std::polar(0.5, 2 * kPi * k / o.grid));
            else
                pts.push_back({-3.0 + 6.0 * k / o.grid, 1.0});
        }
    }
    std::ostringstream os;
    os << "# re\tim";
    for (long i = 0; i < r.n; ++i)
        for (long j = 0; j < r.n; ++j) os << "\tR" << i << j << "_re\tR" << i << j << "_im";
    os << "\n";
    for (cplx p : pts) {
        CMatrix m = r(p);
        os << fmt(p.real()) << "\t" << fmt(p.imag());
        for (long i = 0; i < m.rows(); ++i)
            for (long j = 0; j < m.cols(); ++j) os << "\t" << fmt(m(i, j).real()) << "\t" << fmt(m(i, j).imag());
        os << "\n";
    }
    emit(o, os.str());
    return 0;
}

int cmd_spectrum(const Options& o) {
    InstanceFile inst = load_instance(o.instance);
    SpectralAtoms atoms = atoms_of(inst, tol_of(o));
    std::ostringstream os;
    os << "# " << (atoms.kind == SpectralAtoms::Kind::circle ? "angle" : "point") << "\tweight (row major, re im)\n";
    for (const auto& a : atoms.atoms) {
        os << fmt(a.location);
        for (long i = 0; i < a.weight.rows(); ++i)
            for (long j = 0; j < a.weight.cols(); ++j)
                os << "\t" << fmt(a.weight(i, j).real()) << "\t" << fmt(a.weight(i, j).imag());
        os << "\n";
    }
    emit(o, os.str());
    return 0;
}

int cmd_gap(const Options& o) {
    InstanceFile inst = load_instance(o.instance);
    TolPolicy tol = tol_of(o);
    SpectralAtoms atoms = atoms_of(inst, tol);
    GapReport rep;
    if (inst.kind == InstanceFile::Kind::isometric) {
        if (o.arc.size() != 2) throw std::invalid_argument("isometric instances need --arc t1,t2");
        IsometryOp v = inst.isometry();
        ContractionParam p = inst.exit ? continued_parameter(dilation_model(inst.model(tol), tol), v, tol)
                                       : ContractionParam::constant(defect_subspaces(v, Point(0.0), tol).n_space,
                                                                    defect_subspaces(v, Point::inf(), tol).n_space,
                                                                    inst.parameter->k);
        rep = gap_report(v, p, ArcSpec::arc(o.arc[0], o.arc[1]), o.grid, atoms, tol);
    } else {
        if (o.interval.size() != 2) throw std::invalid_argument("symmetric instances need --interval a,b");
        LinOp a = inst.symmetric();
        cplx z = anchor_of(inst);
        ContractionParam p = inst.exit ? continued_parameter(dilation_model(inst.model(tol), tol), a, z, tol)
                                       : ContractionParam::constant(defect_subspaces(a, z, tol).n_space,
                                                                    defect_subspaces(a, std::conj(z), tol).n_space,
                                                                    inst.parameter->k);
        rep = gap_report(a, p, z, ArcSpec::interval(o.interval[0], o.interval[1]), o.grid, atoms, tol);
    }
    std::ostringstream os;
    os << "verdict: " << rep.verdict() << "\n";
    os << "atoms in region:";
    for (double t : rep.oracle_atoms) os << " " << fmt(t);
    os << "\n";
    os << "oracle agrees: " << (rep.agrees ? "yes" : "no") << "\n";
    os << "# location\tcontinued\tunitarity_defect\tmargin\tregular_bound\n";
    auto row = [&](const GapPoint& g) {
        os << fmt(g.location) << "\t" << (g.continued ? 1 : 0) << "\t" << fmt(g.unitarity_defect) << "\t"
           << fmt(g.margin) << "\t" << fmt(g.regular_bound) << "\n";
    };
    for (const auto& g : rep.grid) row(g);
    os << "# refined minima\n";
    for (const auto& g : rep.refined) row(g);
    emit(o, os.str());
    return rep.agrees ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"operator extension laboratory"};
    app.require_subcommand(1);
    Options o;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--abs-floor", o.abs_floor, "absolute singular value floor");
        sub->add_option("--rank-rel", o.rank_rel, "relative rank threshold (0 selects 16 n eps)");
        sub->add_option("--out", o.out, "output file");
    };

    auto* gen = app.add_subcommand("gen", "write a random instance");
    gen->add_option("--kind", o.kind)->check(CLI::IsMember({"isometric", "symmetric"}));
    gen->add_option("--n", o.n);
    gen->add_option("--d", o.d);
    gen->add_option("--m", o.m);
    gen->add_option("--exit-domain", o.de, "domain dimension of the exit-space operator");
    gen->add_option("--seed", o.seed);
    add_common(gen);

    auto* verify = app.add_subcommand("verify", "run verification suites");
    verify->add_option("instance", o.instance)->required();
    verify->add_option("--suite", o.suite)->check(CLI::IsMember({"axioms", "oracle", "gap", "limits", "all"}));
    verify->add_option("--grid", o.grid);
    verify->add_option("--epsilon", o.epsilon, "sector opening for the limit ray");
    auto* vseed = verify->add_option("--seed", o.seed);
    add_common(verify);

    auto* resolvent = app.add_subcommand("resolvent", "sample the generalized resolvent");
    resolvent->add_option("instance", o.instance)->required();
    resolvent->add_option("--at", o.at, "sample point re,im (repeatable)");
    resolvent->add_option("--grid", o.grid);
    add_common(resolvent);

    auto* spectrum = app.add_subcommand("spectrum", "spectral atoms");
    spectrum->add_option("instance", o.instance)->required();
    add_common(spectrum);

    auto* gap = app.add_subcommand("gap", "gap report on an arc or interval");
    gap->add_option("instance", o.instance)->required();
    gap->add_option("--arc", o.arc)->delimiter(',')->expected(2);
    gap->add_option("--interval", o.interval)->delimiter(',')->expected(2);
    gap->add_option("--grid", o.grid);
    add_common(gap);

    CLI11_PARSE(app, argc, argv);
    o.seed_given = vseed->count() > 0;
    if (o.grid < 2) {
        std::cerr << "error: --grid must be at least 2\n";
        return 2;
    }

    try {
        if (*gen) return cmd_gen(o);
        if (*verify) return cmd_verify(o);
        if (*resolvent) return cmd_resolvent(o);
        if (*spectrum) return cmd_spectrum(o);
        if (*gap) return cmd_gap(o);
    } catch (const NotRegularType& e) {
        std::cerr << "error: " << e.what() << " at (" << fmt(e.point.real()) << ", " << fmt(e.point.imag()) << ")\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}

// quarkfield: command-line front end over the qf library.
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "qf/config.hpp"
#include "qf/corpus.hpp"
#include "qf/domain.hpp"
#include "qf/experiments.hpp"
#include "qf/frame_transform.hpp"
#include "qf/parallel.hpp"
#include "qf/report.hpp"
#include "qf/wavelet.hpp"

namespace {

using namespace qf;
using ojson = nlohmann::ordered_json;

constexpr int exit_ok = 0;
constexpr int exit_usage = 1;
constexpr int exit_fail = 2;

struct Options {
    std::string config;
    std::string out = ".";
    std::optional<std::uint64_t> seed;
    std::string format = "json";
    bool quiet = false;
    std::string input;
    int wavelet_order = 4;
    double rho = 1.5;
    std::vector<double> x0{0.3, 0.1};
};

class Runner {
public:
    explicit Runner(Options o) : opt_(std::move(o))
    {
        cfg_ = opt_.config.empty() ? RunConfig::defaults(1) : RunConfig::load(opt_.config);
        if (opt_.seed) cfg_.corpus.seed = *opt_.seed;
        fmt_ = parse_report_format(opt_.format);
    }

    int build_system();
    int verify(const std::string& what);
    int analyze();
    int synthesize();
    int roundtrip();
    int norm(const std::string& what);
    int frame_ratio();
    int experiment(const std::string& what);
    int domain(const std::string& what);

private:
    Options opt_;
    RunConfig cfg_;
    ReportFormat fmt_ = ReportFormat::Json;
    std::optional<QuarkSystem> sys_;

    const QuarkSystem& system()
    {
        if (!sys_) sys_ = QuarkSystem::build(cfg_.grid(), cfg_.system());
        return *sys_;
    }

    TruncationConfig truncation(Regime r)
    {
        TruncationConfig t;
        t.beta_max = cfg_.beta_max;
        t.j_max = cfg_.levels();
        t.regime = r;
        return t;
    }

    std::vector<RealField> corpus()
    {
        const GridSpec g = cfg_.grid();
        if (cfg_.corpus.kind == "zero") return std::vector<RealField>(cfg_.corpus.count, RealField(g));
        if (cfg_.corpus.kind == "boundary")
            return boundary_vanishing_corpus(g, cfg_.domain_spec(), cfg_.corpus.count, cfg_.corpus.seed);
        return gaussian_corpus(g, cfg_.corpus.count, cfg_.corpus.seed);
    }

    Report report(const std::string& command)
    {
        Report r;
        r.header["command"] = command;
        r.header["timestamp"] = utc_timestamp();
        r.header["seed"] = cfg_.corpus.seed;
        r.header["config"] = cfg_.to_json();
        return r;
    }

    void add_system(Report& r)
    {
        const auto m = system().manifest();
        r.header["system"] = {{"J", m["J"]}, {"eps", m["eps"]}, {"j_max", m["j_max"]}, {"k", m["checksums"]["k"]}};
    }

    int emit(const Report& r, const std::string& stem, bool pass, const std::string& line)
    {
        r.write(opt_.out, stem, fmt_);
        if (!opt_.quiet) std::cout << stem << ": " << (pass ? "" : "FAIL ") << line << "\n";
        return pass ? exit_ok : exit_fail;
    }
};

std::string num(double v)
{
    std::ostringstream os;
    os.precision(4);
    os << v;
    return os.str();
}

std::vector<int> beta_vec(const MultiIndex& b) { return {b.c.begin(), b.c.begin() + b.n}; }

int Runner::build_system()
{
    const QuarkSystem& sys = system();
    Report r = report("build-system");
    r.header["manifest"] = sys.manifest();
    for (const auto& d : sys.duals())
        r.rows.push_back({{"beta", beta_vec(d.beta)},
                          {"omega_truncation", d.omega_truncation},
                          {"imag_F", d.imag_F},
                          {"imag_M", d.imag_M},
                          {"low_band_leak", d.low_band_leak}});
    r.summary = {{"shell_ratio", sys.shell_ratio()}, {"tail_radius", sys.tail_radius()}};
    write_qfld((std::filesystem::path(opt_.out) / "system_k.qfld").string(), to_complex(sys.quark().k));
    return emit(r, "build-system", true, "J=" + std::to_string(sys.quark().J) + " j_max=" + std::to_string(sys.j_max()));
}

int Runner::verify(const std::string& what)
{
    Report r = report("verify " + what);
    bool pass = false;
    std::string line;
    if (what == "partition") {
        const double d = partition_defect(system().quark());
        pass = d <= 1e-10;
        r.summary = {{"max_deviation", d}, {"tolerance", 1e-10}};
        line = "max deviation " + num(d);
    } else if (what == "moments") {
        const MomentReport m = verify_moments(system());
        for (const auto& row : m.rows)
            r.rows.push_back({{"beta", beta_vec(row.beta)}, {"gamma", beta_vec(row.gamma)}, {"moment", row.moment},
                              {"bound", row.bound}});
        pass = m.pass;
        r.summary = {{"worst_ratio", m.worst_ratio}};
        line = "worst moment/bound " + num(m.worst_ratio);
    } else if (what == "decay") {
        const DecayReport d = verify_decay(system(), {0.0, 1.0, 2.0, 3.0});
        for (const auto& row : d.rows) r.rows.push_back({{"beta", beta_vec(row.beta)}, {"log2_sup", row.log2_sup}});
        pass = d.pass;
        r.summary = {{"N", d.N}, {"kappas", d.kappas}, {"slope_1_4", d.slope_1_4}, {"slope_2_max", d.slope_2_max},
                     {"quark_slope", d.quark_slope}};
        line = "slope at kappa=3 over |beta| 1..4: " + num(d.slope_1_4.back());
    } else if (what == "realness") {
        double im = 0.0, leak = 0.0;
        for (const auto& d : system().duals()) {
            im = std::max({im, d.imag_F, d.imag_M});
            leak = std::max(leak, d.low_band_leak);
            r.rows.push_back({{"beta", beta_vec(d.beta)}, {"imag_F", d.imag_F}, {"imag_M", d.imag_M},
                              {"low_band_leak", d.low_band_leak}});
        }
        pass = im <= 1e-10 && leak <= 1e-10;
        r.summary = {{"max_imag", im}, {"max_low_band_leak", leak}, {"tolerance", 1e-10}};
        line = "max imaginary part " + num(im);
    } else if (what == "wavelet") {
        const WaveletPair w = build_wavelet_pair(opt_.wavelet_order, cfg_.grid());
        const WaveletInvariants inv = wavelet_invariants(w);
        const GramReport gram = wavelet_gram(w, cfg_.n);
        double mom = 0.0;
        for (double m : inv.moments) mom = std::max(mom, std::abs(m));
        pass = gram.max_offdiag <= 1e-5 && gram.max_diag_defect <= 1e-5 && mom <= 1e-8;
        r.summary = {{"u", w.u},
                     {"eigen_residual", w.eigen_residual},
                     {"moments", inv.moments},
                     {"shift_overlap", inv.shift_overlap},
                     {"gram_max_offdiag", gram.max_offdiag},
                     {"gram_max_diag_defect", gram.max_diag_defect},
                     {"gram_size", gram.size}};
        line = "Gram off-diagonal " + num(gram.max_offdiag);
    } else {
        fail(ErrorKind::Config, "unknown verify target " + what);
    }
    r.header["pass"] = pass;
    if (what != "wavelet") add_system(r);
    return emit(r, "verify_" + what, pass, line);
}

int Runner::analyze()
{
    const QuarkSystem& sys = system();
    const Regime regime = regime_for(cfg_.space, cfg_.n);
    const TruncationConfig tc = truncation(regime);
    std::vector<RealField> fields;
    if (!opt_.input.empty())
        fields.push_back(require_real(read_qfld(opt_.input), 1e-12));
    else
        fields = corpus();
    Report r = report("analyze");
    add_system(r);
    const SequenceSpec ss = sequence_spec_for(cfg_.space, sys.grid());
    for (std::size_t i = 0; i < fields.size(); ++i) {
        const CoefficientTensor lam = qf::analyze(fields[i], sys, tc);
        const std::string file = "analyze_" + std::to_string(i) + ".jsonl";
        write_jsonl((std::filesystem::path(opt_.out) / file).string(), lam);
        r.rows.push_back({{"id", i},
                          {"field_checksum", hex64(checksum(fields[i]))},
                          {"nonzeros", lam.nonzeros()},
                          {"max_abs", lam.max_abs()},
                          {"sequence_norm", sequence_norm(lam, ss)},
                          {"file", file}});
    }
    r.summary = {{"regime", regime == Regime::Positive ? "positive" : "negative"}, {"count", fields.size()}};
    return emit(r, "analyze", true, std::to_string(fields.size()) + " coefficient files");
}

int Runner::synthesize()
{
    require(!opt_.input.empty(), ErrorKind::Config, "synthesize needs --input COEFFICIENTS.jsonl");
    const QuarkSystem& sys = system();
    const CoefficientTensor lam = read_jsonl(opt_.input, cfg_.n);
    const Regime regime = regime_for(cfg_.space, cfg_.n);
    const ComplexField f = qf::synthesize(lam, sys, truncation(regime));
    write_qfld((std::filesystem::path(opt_.out) / "synthesize.qfld").string(), f);
    Report r = report("synthesize");
    add_system(r);
    r.summary = {{"entries", lam.nonzeros()}, {"field_checksum", hex64(checksum(f))}, {"sup", sup_norm(f)},
                 {"imag_ratio", imag_ratio(f)}};
    return emit(r, "synthesize", true, "field checksum " + hex64(checksum(f)));
}

int Runner::roundtrip()
{
    const QuarkSystem& sys = system();
    const Regime regime = regime_for(cfg_.space, cfg_.n);
    const auto fields = corpus();
    std::vector<double> l2(fields.size()), sup(fields.size());
    parallel_for(fields.size(), [&](std::size_t i) {
        l2[i] = round_trip_residual(fields[i], sys, truncation(regime), ResidualNorm::L2);
        sup[i] = round_trip_residual(fields[i], sys, truncation(regime), ResidualNorm::Sup);
    });
    Report r = report("roundtrip");
    add_system(r);
    for (std::size_t i = 0; i < fields.size(); ++i)
        r.rows.push_back({{"id", i}, {"residual_l2", l2[i]}, {"residual_sup", sup[i]}});
    r.summary = summarize(l2);
    return emit(r, "roundtrip", true, "max relative L2 residual " + num(r.summary.value("max", 0.0)));
}

int Runner::norm(const std::string& what)
{
    const auto fields = corpus();
    const GridSpec g = cfg_.grid();
    const ResolutionOfUnity res = build_resolution(g, cfg_.levels());
    Report r = report("norm " + what);
    r.header["spec"] = cfg_.space.describe();
    std::vector<double> values(fields.size());
    if (what == "reference") {
        for (std::size_t i = 0; i < fields.size(); ++i) {
            const NormReport nr = reference_norm_report(to_complex(fields[i]), cfg_.space, res);
            values[i] = nr.value;
            r.rows.push_back({{"id", i}, {"value", nr.value}, {"per_level_contributions", nr.per_level}});
        }
    } else if (what == "sequence") {
        const QuarkSystem& sys = system();
        add_system(r);
        const Regime regime = regime_for(cfg_.space, cfg_.n);
        const SequenceSpec ss = sequence_spec_for(cfg_.space, g);
        for (std::size_t i = 0; i < fields.size(); ++i) {
            const SequenceNormReport nr = sequence_norm_report(qf::analyze(fields[i], sys, truncation(regime)), ss);
            values[i] = nr.value;
            r.rows.push_back({{"id", i}, {"value", nr.value}, {"beta_argmax", beta_vec(nr.beta_argmax)}});
        }
    } else if (what == "rloc") {
        const DomainSpec omega = cfg_.domain_spec();
        const WhitneyCover cover = whitney_decompose(omega, cfg_.domain.K, cfg_.domain.J_max, g);
        const DomainPartition part = build_domain_partition(cover, omega, g);
        for (std::size_t i = 0; i < fields.size(); ++i) {
            values[i] = rloc_norm(fields[i], cfg_.space, part, res);
            r.rows.push_back({{"id", i}, {"value", values[i]}});
        }
    } else {
        fail(ErrorKind::Config, "unknown norm kind " + what);
    }
    r.summary = summarize(values);
    double mx = 0.0;
    for (double v : values) mx = std::max(mx, v);
    return emit(r, "norm_" + what, true, "max value " + num(mx));
}

int Runner::frame_ratio()
{
    const Regime regime = regime_for(cfg_.space, cfg_.n);
    const auto fields = corpus();
    const QuarkSystem& sys = system();
    const ResolutionOfUnity res = build_resolution(cfg_.grid(), cfg_.levels());
    const RatioReport rr = frame_ratio_report(fields, cfg_.space, sys, truncation(regime), res);
    Report r = report("frame-ratio");
    add_system(r);
    r.header["spec"] = cfg_.space.describe();
    for (const auto& row : rr.rows)
        r.rows.push_back({{"id", row.id}, {"sequence", row.sequence}, {"reference", row.reference}, {"ratio", row.ratio}});
    r.summary = {{"min", rr.min}, {"max", rr.max}, {"spread", rr.spread},
                 {"regime", regime == Regime::Positive ? "positive" : "negative"}};
    return emit(r, "frame-ratio", true, "spread " + num(rr.spread));
}

int Runner::experiment(const std::string& what)
{
    const GridSpec g = cfg_.grid();
    Report r = report("experiment " + what);
    r.header["experiment"] = what;
    r.header["spec"] = cfg_.space.describe();
    std::string line;
    if (what == "positivity") {
        const Regime regime = regime_for(cfg_.space, cfg_.n);
        require(regime == Regime::Positive, ErrorKind::HypothesisViolated, "positivity needs s > sigma_p");
        const QuarkSystem& sys = system();
        add_system(r);
        const ResolutionOfUnity res = build_resolution(g, cfg_.levels());
        const auto fields = corpus();
        std::vector<double> ratios;
        for (std::size_t i = 0; i < fields.size(); ++i) {
            const PositivityReport p = positivity_experiment(fields[i], sys, truncation(regime), cfg_.space, res);
            ratios.push_back(p.norm_sum_ratio);
            r.rows.push_back({{"id", i},
                              {"min_f1", p.min_f1},
                              {"min_f2", p.min_f2},
                              {"sup_f1", p.sup_f1},
                              {"sup_f2", p.sup_f2},
                              {"residual_sup", p.residual_sup},
                              {"split_identity", p.split_identity},
                              {"norm_sum_ratio", p.norm_sum_ratio},
                              {"sequence_sum_ratio", p.sequence_sum_ratio}});
        }
        r.summary = summarize(ratios);
        line = "norm-sum ratio max " + num(r.summary.value("max", 0.0));
    } else if (what == "algebra" || what == "multiplier") {
        const ResolutionOfUnity res = build_resolution(g, cfg_.levels());
        auto fields = corpus();
        std::vector<double> ratios;
        for (std::size_t i = 0; i + 1 < fields.size(); i += 2) {
            const double v = what == "algebra"
                                 ? multiplication_algebra_probe(fields[i], fields[i + 1], cfg_.space, res)
                                 : pointwise_multiplier_probe(fields[i], fields[i + 1], cfg_.space, opt_.rho, res);
            ratios.push_back(v);
            r.rows.push_back({{"pair", i / 2}, {"ratio", v}});
        }
        if (what == "multiplier") r.header["rho"] = opt_.rho;
        r.summary = summarize(ratios);
        line = "max ratio " + num(r.summary.value("max", 0.0));
    } else if (what == "homogeneity") {
        const std::vector<double> lambdas{0.5, 0.25, 0.125, 0.0625};
        const int n = cfg_.n;
        const HomogeneityReport h = homogeneity_probe(
            [n](const Point& x) { return homogeneity_base_bump(x, n); }, 0.5, cfg_.space, lambdas, g);
        for (std::size_t i = 0; i < h.lambdas.size(); ++i)
            r.rows.push_back({{"lambda", h.lambdas[i]}, {"ratio", h.ratios[i]}});
        r.summary = {{"slope", h.slope}, {"expected", h.expected}};
        line = "fitted exponent " + num(h.slope) + " (expected " + num(h.expected) + ")";
    } else if (what == "delta") {
        const QuarkSystem& sys = system();
        add_system(r);
        const Point x0{opt_.x0.at(0), cfg_.n == 2 ? opt_.x0.at(1) : 0.0};
        const DeltaReport d = delta_expansion_demo(x0, sys, default_delta_probes(x0, cfg_.n), 2, sys.j_max());
        for (std::size_t p = 0; p < d.probes.size(); ++p)
            for (std::size_t l = 0; l < d.levels.size(); ++l)
                r.rows.push_back({{"probe", d.probes[p]}, {"J", d.levels[l]}, {"error", d.errors[p][l]}});
        r.summary = {{"x0", {x0[0], x0[1]}},
                     {"slope", d.slopes},
                     {"monotone_trend", d.monotone},
                     {"strictly_monotone", d.strictly_monotone},
                     {"max_terms_per_level", d.max_terms_per_level},
                     {"final_max", d.final_max}};
        line = "final error " + num(d.final_max);
    } else {
        fail(ErrorKind::Config, "unknown experiment " + what);
    }
    return emit(r, "experiment_" + what, true, line);
}

int Runner::domain(const std::string& what)
{
    const GridSpec g = cfg_.grid();
    const DomainSpec omega = cfg_.domain_spec();
    const WhitneyCover cover = whitney_decompose(omega, cfg_.domain.K, cfg_.domain.J_max, g);
    Report r = report("domain " + what);
    r.header["domain"] = omega.to_json();
    std::string line;
    if (what == "whitney") {
        const nlohmann::json cj = cover.to_json(omega);
        for (const auto& c : cj) r.rows.push_back(ojson(c));
        r.summary = {{"cubes", cover.cubes.size()}, {"uncovered_measure", cover.uncovered_measure}};
        line = std::to_string(cover.cubes.size()) + " cubes";
    } else if (what == "partition") {
        const DomainPartition part = build_domain_partition(cover, omega, g);
        const PartitionConstants pc = partition_constants(part);
        for (std::size_t l = 0; l < pc.levels.size(); ++l)
            r.rows.push_back({{"J", pc.levels[l]}, {"c0", pc.c[l][0]}, {"c1", pc.c[l][1]}, {"c2", pc.c[l][2]}});
        const RealField total = part.total();
        r.summary = {{"pieces", part.pieces.size()}, {"dilation", part.dilation},
                     {"total_checksum", hex64(checksum(total))}};
        line = std::to_string(part.pieces.size()) + " pieces";
    } else if (what == "analyze" || what == "synthesize") {
        const QuarkSystem& sys = system();
        add_system(r);
        const DomainPartition part = build_domain_partition(cover, omega, g);
        const int j_max = std::min(cfg_.levels(), sys.j_max());
        if (what == "analyze") {
            const auto fields = boundary_vanishing_corpus(g, omega, cfg_.corpus.count, cfg_.corpus.seed);
            for (std::size_t i = 0; i < fields.size(); ++i) {
                const CoefficientTensor lam = domain_analyze(fields[i], sys, part, omega, cfg_.beta_max, j_max);
                const std::string file = "domain_analyze_" + std::to_string(i) + ".jsonl";
                write_jsonl((std::filesystem::path(opt_.out) / file).string(), lam);
                r.rows.push_back({{"id", i}, {"nonzeros", lam.nonzeros()}, {"max_abs", lam.max_abs()}, {"file", file}});
            }
            line = std::to_string(fields.size()) + " coefficient files";
        } else if (!opt_.input.empty()) {
            const ComplexField f = domain_synthesize(read_jsonl(opt_.input, cfg_.n), sys, cover, omega);
            write_qfld((std::filesystem::path(opt_.out) / "domain_synthesize.qfld").string(), f);
            r.summary = {{"field_checksum", hex64(checksum(f))}, {"sup", sup_norm(f)}};
            line = "field checksum " + hex64(checksum(f));
        } else {
            // no input: synthesize the analysis of the boundary-vanishing corpus and report residuals
            const auto fields = boundary_vanishing_corpus(g, omega, cfg_.corpus.count, cfg_.corpus.seed);
            std::vector<double> res(fields.size());
            parallel_for(fields.size(), [&](std::size_t i) {
                const ComplexField back =
                    domain_synthesize(domain_analyze(fields[i], sys, part, omega, cfg_.beta_max, j_max), sys, cover, omega);
                const double nf = lp_norm(fields[i], 2.0);
                res[i] = nf > 0.0 ? lp_norm(back - to_complex(fields[i]), 2.0) / nf : 0.0;
            });
            for (std::size_t i = 0; i < res.size(); ++i) r.rows.push_back({{"id", i}, {"residual_l2", res[i]}});
            r.summary = summarize(res);
            line = "max relative L2 residual " + num(r.summary.value("max", 0.0));
        }
    } else {
        fail(ErrorKind::Config, "unknown domain command " + what);
    }
    return emit(r, "domain_" + what, true, line);
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"quarkfield: quarkonial decompositions of sampled fields"};
    app.require_subcommand(1);
    Options opt;
    app.add_option("--config", opt.config, "run configuration (JSON)")->check(CLI::ExistingFile);
    app.add_option("--out", opt.out, "report directory");
    app.add_option("--seed", opt.seed, "corpus seed, overrides the config");
    app.add_option("--format", opt.format, "report format")->check(CLI::IsMember({"json", "csv", "both"}));
    app.add_flag("--quiet", opt.quiet, "no summary line on stdout");

    std::string target;
    auto* build = app.add_subcommand("build-system", "build the quark system and write its manifest");
    auto* verify = app.add_subcommand("verify", "check a structural invariant");
    verify->add_option("target", target, "partition|moments|decay|realness|wavelet")
        ->required()
        ->check(CLI::IsMember({"partition", "moments", "decay", "realness", "wavelet"}));
    verify->add_option("--order", opt.wavelet_order, "Daubechies order for the wavelet check")->check(CLI::Range(2, 4));
    auto* analyze = app.add_subcommand("analyze", "quark coefficients of the corpus or of --input");
    analyze->add_option("--input", opt.input, "field in the binary field format");
    auto* synth = app.add_subcommand("synthesize", "field from a coefficient file");
    synth->add_option("--input", opt.input, "coefficients, one JSON record per line");
    auto* rt = app.add_subcommand("roundtrip", "synthesis of the analysis, residual per corpus member");
    auto* norm = app.add_subcommand("norm", "norms of the corpus");
    norm->add_option("kind", target, "reference|sequence|rloc")
        ->required()
        ->check(CLI::IsMember({"reference", "sequence", "rloc"}));
    auto* ratio = app.add_subcommand("frame-ratio", "sequence over reference norm on the corpus");
    auto* exper = app.add_subcommand("experiment", "application probes");
    exper->add_option("name", target, "positivity|algebra|multiplier|homogeneity|delta")
        ->required()
        ->check(CLI::IsMember({"positivity", "algebra", "multiplier", "homogeneity", "delta"}));
    exper->add_option("--rho", opt.rho, "Hoelder exponent of the multiplier");
    exper->add_option("--x0", opt.x0, "point mass location")->expected(1, 2);
    auto* dom = app.add_subcommand("domain", "domain decomposition");
    dom->add_option("step", target, "whitney|partition|analyze|synthesize")
        ->required()
        ->check(CLI::IsMember({"whitney", "partition", "analyze", "synthesize"}));
    dom->add_option("--input", opt.input, "coefficients for synthesize");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_usage;
    }

    try {
        Runner run(opt);
        if (*build) return run.build_system();
        if (*verify) return run.verify(target);
        if (*analyze) return run.analyze();
        if (*synth) return run.synthesize();
        if (*rt) return run.roundtrip();
        if (*norm) return run.norm(target);
        if (*ratio) return run.frame_ratio();
        if (*exper) return run.experiment(target);
        if (*dom) return run.domain(target);
    } catch (const qf::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_usage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_usage;
    }
    return exit_usage;
}

#include "fdl/cli.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <ostream>
#include <random>
#include <sstream>

#include "fdl/filler.hpp"
#include "fdl/grad.hpp"
#include "fdl/io.hpp"
#include "fdl/losses.hpp"
#include "fdl/metrics.hpp"
#include "fdl/optimize.hpp"
#include "fdl/scenes.hpp"
#include "fdl/texture.hpp"

namespace fdl {

namespace {

void add_weight_options(CLI::App* cmd, LossWeights& w) {
    cmd->add_option("--alpha-ap", w.alpha_ap, "reconstruction weight")->capture_default_str();
    cmd->add_option("--alpha-ds", w.alpha_ds, "smoothness weight")->capture_default_str();
    cmd->add_option("--alpha-lr", w.alpha_lr, "left-right consistency weight")->capture_default_str();
    cmd->add_option("--alpha-fd", w.alpha_fd, "filled disparity weight")->capture_default_str();
    cmd->add_option("--ssim-alpha", w.ssim_alpha, "SSIM share of the reconstruction term")->capture_default_str();
}

void add_rig_options(CLI::App* cmd, CameraRig& rig) {
    cmd->add_option("--baseline", rig.baseline_m, "stereo baseline in metres")->capture_default_str();
    cmd->add_option("--focal", rig.focal_px, "focal length in pixels")->capture_default_str();
    cmd->add_option("--max-depth", rig.depth_max_m, "depth saturation in metres")->capture_default_str();
}

std::string fixed(double v, int digits = 6) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

std::string sample_name(const char* stem, int index, const char* ext) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%s_%04d%s", stem, index, ext);
    return buf;
}

ActiveMask inactive_of(const ActiveMask& mask) {
    ActiveMask out(mask.height(), mask.width());
    for (std::size_t p = 0; p < mask.size(); ++p) out[p] = mask[p] ? 0 : 1;
    return out;
}

std::vector<double> parse_edges(const std::string& text) {
    std::vector<double> edges;
    std::stringstream ss(text);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
        try {
            std::size_t used = 0;
            edges.push_back(std::stod(cell, &used));
            if (used != cell.size()) throw std::invalid_argument(cell);
        } catch (const std::exception&) {
            throw CLI::ValidationError("--edges", "'" + cell + "' is not a number");
        }
    }
    return edges;
}

struct Options {
    // shared
    std::string output;
    LossWeights weights;
    CameraRig rig;
    std::uint64_t seed = 0;

    std::string image, disparity, truth;
    std::string left, right, d_left, d_right;
    double threshold = kDefaultTextureThreshold;
    int samples = 50;
    double step_h = 1e-3;
    double tolerance = 1e-2;
    std::string fixture_name, scene_file, truth_file;
    OptimizerConfig optimizer;
    std::string mask_file;
    std::string covariate, edges, manifest, region = "all";
    std::string dataset = "N";
    int count = 1;
};

void add_pair_inputs(CLI::App* cmd, Options& o) {
    cmd->add_option("left", o.left, "left image")->required()->check(CLI::ExistingFile);
    cmd->add_option("right", o.right, "right image")->required()->check(CLI::ExistingFile);
    cmd->add_option("d_left", o.d_left, "left disparity PFM")->required()->check(CLI::ExistingFile);
    cmd->add_option("d_right", o.d_right, "right disparity PFM")->required()->check(CLI::ExistingFile);
}

int cmd_mask(const Options& o, std::ostream& out) {
    const ImageField gray = as_gray(read_image(o.image));
    const ActiveMask mask = texture_mask(gray, o.threshold);
    write_mask(mask, o.output);
    out << "texturedness " << fixed(texturedness(mask)) << "\n";
    return 0;
}

int cmd_fill(const Options& o, std::ostream& out) {
    const DisparityMap disp = read_disparity(o.disparity);
    const ImageField gray = as_gray(read_image(o.image));
    const FilledDisparity f = fill_disparity(disp, gray);
    write_pfm(f.filled, o.output);
    out << "filled " << (f.mask.size() - f.mask.active_count()) << " inactive pixels\n";
    return 0;
}

StereoPair read_pair(const std::string& left, const std::string& right) {
    StereoPair pair{read_image(left), read_image(right)};
    validate(pair);
    return pair;
}

int cmd_loss(const Options& o, std::ostream& out) {
    const StereoPair pair = read_pair(o.left, o.right);
    const LossBreakdown b = total_loss(pair, read_disparity(o.d_left), read_disparity(o.d_right), o.weights);
    write_csv(o.output, b, o.weights);
    out << "total " << format_real(b.total) << "\n";
    return 0;
}

int cmd_grad_check(const Options& o, std::ostream& out, std::ostream& err) {
    const StereoPair pair = read_pair(o.left, o.right);
    const DisparityMap dl = read_disparity(o.d_left);
    const DisparityMap dr = read_disparity(o.d_right);
    const TotalGradCheck check = check_grad_total(pair, dl, dr, o.weights, o.samples, o.seed, o.step_h);
    std::string csv = "map,row,col,analytic,numeric,rel_error\n";
    auto rows = [&](const char* name, const GradCheckReport& r, int width) {
        for (const GradCheckPoint& p : r.points)
            csv += std::string(name) + "," + std::to_string(p.index / static_cast<std::size_t>(width)) + "," +
                   std::to_string(p.index % static_cast<std::size_t>(width)) + "," + format_real(p.analytic) + "," +
                   format_real(p.numeric) + "," + format_real(p.rel_error) + "\n";
    };
    rows("left", check.left, dl.width());
    rows("right", check.right, dr.width());
    write_file_atomic(o.output, csv);
    const std::size_t checked = check.left.points.size() + check.right.points.size();
    out << "max relative error " << format_real(check.max_rel_error()) << " over " << checked << " pixels ("
        << check.left.skipped + check.right.skipped << " skipped near kinks)\n";
    if (checked == 0) {
        err << "error: no pixel away from a kink could be checked\n";
        return 2;
    }
    if (check.max_rel_error() > o.tolerance) {
        err << "error: relative error exceeds tolerance " << format_real(o.tolerance) << "\n";
        return 2;
    }
    return 0;
}

int cmd_optimize(const Options& o, std::ostream& out) {
    StereoPair pair;
    std::optional<DisparityMap> truth;
    if (!o.fixture_name.empty() || !o.scene_file.empty()) {
        const SceneSpec spec = o.scene_file.empty() ? fixture(o.fixture_name) : parse_scene(read_file(o.scene_file));
        RenderedScene scene = render_stereo(spec);
        pair = std::move(scene.pair);
        truth = std::move(scene.disparity_left);
    } else {
        pair = read_pair(o.left, o.right);
        if (!o.truth_file.empty()) truth = read_disparity(o.truth_file);
    }
    const OptimizeTrace trace = optimize_disparity(pair, o.weights, o.optimizer);

    const fs::path dir(o.output);
    fs::create_directories(dir);
    write_pfm(trace.d_left, dir / "disp_left.pfm");
    write_pfm(trace.d_right, dir / "disp_right.pfm");
    write_csv(dir / "trace.csv", trace);
    out << "final loss " << format_real(trace.steps.back().total) << " after " << trace.steps.size() << " steps\n";
    if (truth) {
        const ActiveMask mask = texture_mask(as_gray(pair.left));
        const RegionMetrics m = evaluate_run(trace, *truth, o.rig, mask);
        write_csv(dir / "metrics.csv", m);
        auto line = [&](const char* name, const std::optional<DepthMetricsReport>& r) {
            if (r) out << name << " abs_rel " << fixed(r->abs_rel) << "\n";
        };
        line("all", m.all);
        line("active", m.active);
        line("inactive", m.inactive);
    }
    return 0;
}

int cmd_metrics(const Options& o, std::ostream& out) {
    const RealGrid depth = disp_to_depth(read_disparity(o.disparity), o.rig);
    const RealGrid truth = disp_to_depth(read_disparity(o.truth), o.rig);
    std::optional<ActiveMask> valid;
    if (!o.mask_file.empty()) {
        const ImageField m = read_pnm(o.mask_file);
        if (m.channels() != 1) throw Error(Errc::WrongChannelCount, "mask must be a single-channel PGM");
        valid.emplace(m.height(), m.width());
        for (std::size_t p = 0; p < valid->size(); ++p) (*valid)[p] = m.data()[p] > 0.5 ? 1 : 0;
    }
    const DepthMetricsReport r = depth_metrics(depth, truth, valid ? &*valid : nullptr);
    write_csv(o.output, r);
    out << "abs_rel " << fixed(r.abs_rel) << " rmse " << fixed(r.rmse) << " delta_1 " << fixed(r.delta_1) << "\n";
    return 0;
}

int cmd_bin(const Options& o, std::ostream& out) {
    const std::vector<double> edges = parse_edges(o.edges);
    const fs::path manifest(o.manifest);
    const fs::path base = manifest.parent_path();
    const CsvTable table = read_csv(manifest);
    const std::size_t c_pred = table.column("prediction");
    const std::size_t c_truth = table.column("ground_truth");
    const std::size_t c_cov = table.column(o.covariate);
    const bool need_mask = o.region != "all";
    const std::size_t c_left = need_mask ? table.column("left") : 0;

    auto resolve = [&](const std::string& p) { return fs::path(p).is_absolute() ? fs::path(p) : base / p; };
    std::vector<BinSample> samples;
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
        const auto& row = table.rows[i];
        BinSample s;
        try {
            std::size_t used = 0;
            s.covariate = std::stod(row[c_cov], &used);
            if (used != row[c_cov].size()) throw std::invalid_argument(row[c_cov]);
        } catch (const std::exception&) {
            throw Error(Errc::InvalidArgument, "manifest row " + std::to_string(i + 1) + ": bad " + o.covariate);
        }
        s.depth = disp_to_depth(read_disparity(resolve(row[c_pred])), o.rig);
        s.truth = disp_to_depth(read_disparity(resolve(row[c_truth])), o.rig);
        if (need_mask) {
            const ActiveMask mask = texture_mask(as_gray(read_image(resolve(row[c_left]))));
            s.valid = o.region == "active" ? mask : inactive_of(mask);
        }
        samples.push_back(std::move(s));
    }
    const BinnedReport report = bin_metrics(o.covariate, samples, edges);
    write_csv(o.output, report);
    for (std::size_t k = 0; k < report.bins.size(); ++k) {
        const BinRow& b = report.bins[k];
        const char* close = k + 1 == report.bins.size() ? "]" : ")";
        out << "[" << format_real(b.lower) << ", " << format_real(b.upper) << close << " samples " << b.samples;
        if (b.pooled) out << " abs_rel " << fixed(b.pooled->abs_rel);
        out << "\n";
    }
    return 0;
}

int cmd_gen(const Options& o, std::ostream& out) {
    const RotationDataset dataset = parse_dataset(o.dataset);
    const SceneSpec base = o.scene_file.empty() ? fixture(o.fixture_name) : parse_scene(read_file(o.scene_file));
    const fs::path dir(o.output);
    fs::create_directories(dir);
    std::mt19937_64 rng(o.seed);
    std::string meta = "index,left,right,ground_truth,pitch,roll,texturedness\n";
    for (int i = 0; i < o.count; ++i) {
        SceneSpec spec = base;
        spec.seed = rng();
        const RotationSample rot = sample_rotation(dataset, rng);
        const RenderedScene scene = render_stereo(spec, rot);
        const std::string left = sample_name("left", i, scene.pair.left.channels() == 3 ? ".ppm" : ".pgm");
        const std::string right = sample_name("right", i, scene.pair.right.channels() == 3 ? ".ppm" : ".pgm");
        const std::string truth = sample_name("disparity", i, ".pfm");
        write_pnm(scene.pair.left, dir / left);
        write_pnm(scene.pair.right, dir / right);
        write_pfm(scene.disparity_left, dir / truth);
        const double tex = texturedness(texture_mask(as_gray(scene.pair.left)));
        meta += std::to_string(i) + "," + left + "," + right + "," + truth + "," + format_real(rot.pitch_deg) + "," +
                format_real(rot.roll_deg) + "," + format_real(tex) + "\n";
    }
    write_file_atomic(dir / "metadata.csv", meta);
    out << "wrote " << o.count << " samples to " << dir.string() << "\n";
    return 0;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Filled disparity loss toolkit: texture masks, disparity filling, losses and evaluation", "fdl"};
    app.require_subcommand(1);
    Options o;

    CLI::App* mask = app.add_subcommand("mask", "write the texture mask of an image");
    mask->add_option("image", o.image, "input PGM/PPM/PFM image")->required()->check(CLI::ExistingFile);
    mask->add_option("-o,--output", o.output, "output mask PGM")->required();
    mask->add_option("--threshold", o.threshold, "normalised gradient threshold")->capture_default_str();

    CLI::App* fill = app.add_subcommand("fill", "fill a disparity map from its textured pixels");
    fill->add_option("disparity", o.disparity, "input disparity PFM")->required()->check(CLI::ExistingFile);
    fill->add_option("image", o.image, "image that defines the texture mask")->required()->check(CLI::ExistingFile);
    fill->add_option("-o,--output", o.output, "output PFM")->required();

    CLI::App* loss = app.add_subcommand("loss", "evaluate the four-scale loss");
    add_pair_inputs(loss, o);
    add_weight_options(loss, o.weights);
    loss->add_option("-o,--output", o.output, "output CSV")->required();

    CLI::App* gc = app.add_subcommand("grad-check", "compare analytic and finite-difference gradients");
    add_pair_inputs(gc, o);
    add_weight_options(gc, o.weights);
    gc->add_option("--samples", o.samples, "pixels to check")->capture_default_str()->check(CLI::PositiveNumber);
    gc->add_option("--seed", o.seed, "pixel sampling seed")->capture_default_str();
    gc->add_option("--step", o.step_h, "finite-difference step")->capture_default_str()->check(CLI::PositiveNumber);
    gc->add_option("--tolerance", o.tolerance, "maximum relative error")->capture_default_str();
    gc->add_option("-o,--output", o.output, "per-pixel CSV")->required();

    CLI::App* opt = app.add_subcommand("optimize", "estimate both disparity maps by direct optimisation");
    auto* fx = opt->add_option("--fixture", o.fixture_name, "built-in scene")
                   ->check(CLI::IsMember(fixture_names()));
    auto* sc = opt->add_option("--scene", o.scene_file, "scene description file")->check(CLI::ExistingFile);
    auto* ol = opt->add_option("--left", o.left, "left image")->check(CLI::ExistingFile);
    auto* orr = opt->add_option("--right", o.right, "right image")->check(CLI::ExistingFile);
    auto* gt = opt->add_option("--ground-truth", o.truth_file, "left ground-truth disparity PFM")
                   ->check(CLI::ExistingFile);
    fx->excludes(sc)->excludes(ol)->excludes(orr)->excludes(gt);
    sc->excludes(ol)->excludes(orr)->excludes(gt);
    ol->needs(orr);
    orr->needs(ol);
    add_weight_options(opt, o.weights);
    add_rig_options(opt, o.rig);
    opt->add_option("--steps", o.optimizer.steps, "Adam steps")->capture_default_str();
    opt->add_option("--lr", o.optimizer.learning_rate, "learning rate")->capture_default_str();
    opt->add_option("--init", o.optimizer.init_disparity, "initial disparity")->capture_default_str();
    opt->add_option("--seed", o.optimizer.seed, "initialisation seed")->capture_default_str();
    opt->add_option("-o,--output", o.output, "output directory")->required();

    CLI::App* met = app.add_subcommand("metrics", "depth error of a disparity map against ground truth");
    met->add_option("disparity", o.disparity, "predicted disparity PFM")->required()->check(CLI::ExistingFile);
    met->add_option("truth", o.truth, "ground-truth disparity PFM")->required()->check(CLI::ExistingFile);
    met->add_option("--mask", o.mask_file, "PGM selecting the evaluated pixels")->check(CLI::ExistingFile);
    add_rig_options(met, o.rig);
    met->add_option("-o,--output", o.output, "output CSV")->required();

    CLI::App* bin = app.add_subcommand("bin", "depth error binned by a per-sample covariate");
    bin->add_option("--covariate", o.covariate, "manifest column to bin by")
        ->required()
        ->check(CLI::IsMember({"texturedness", "pitch", "roll"}));
    bin->add_option("--edges", o.edges, "ascending bin edges, comma separated")->required();
    bin->add_option("--region", o.region, "pixels evaluated per sample")
        ->capture_default_str()
        ->check(CLI::IsMember({"all", "active", "inactive"}));
    bin->add_option("manifest", o.manifest, "CSV with prediction, ground_truth and covariate columns")
        ->required()
        ->check(CLI::ExistingFile);
    add_rig_options(bin, o.rig);
    bin->add_option("-o,--output", o.output, "output CSV")->required();

    CLI::App* gen = app.add_subcommand("gen", "render synthetic stereo samples with ground truth");
    auto* gfx = gen->add_option("--fixture", o.fixture_name, "built-in scene")->check(CLI::IsMember(fixture_names()));
    auto* gsc = gen->add_option("--scene", o.scene_file, "scene description file")->check(CLI::ExistingFile);
    gfx->excludes(gsc);
    gen->add_option("--dataset", o.dataset, "rotation regime")
        ->capture_default_str()
        ->check(CLI::IsMember({"N", "R", "P", "PR"}));
    gen->add_option("--count", o.count, "number of samples")->capture_default_str()->check(CLI::PositiveNumber);
    gen->add_option("--seed", o.seed, "generator seed")->capture_default_str();
    gen->add_option("-o,--output", o.output, "output directory")->required();

    try {
        app.parse(argc, argv);
        if (opt->parsed() && o.fixture_name.empty() && o.scene_file.empty() && o.left.empty())
            throw CLI::RequiredError("optimize needs --fixture, --scene or --left/--right");
        if (gen->parsed() && o.fixture_name.empty() && o.scene_file.empty())
            throw CLI::RequiredError("gen needs --fixture or --scene");
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err) == 0 ? 0 : 1;
    }

    try {
        if (mask->parsed()) return cmd_mask(o, out);
        if (fill->parsed()) return cmd_fill(o, out);
        if (loss->parsed()) return cmd_loss(o, out);
        if (gc->parsed()) return cmd_grad_check(o, out, err);
        if (opt->parsed()) return cmd_optimize(o, out);
        if (met->parsed()) return cmd_metrics(o, out);
        if (bin->parsed()) return cmd_bin(o, out);
        if (gen->parsed()) return cmd_gen(o, out);
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err) == 0 ? 0 : 1;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }
    return 1;
}

}  // namespace fdl

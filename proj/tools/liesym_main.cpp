// Command-line interface: dataset generation, jet estimation, surrogate
// training, symmetry discovery, basis sparsification, evaluation, reporting.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "liesym/discover.hpp"
#include "liesym/metrics.hpp"
#include "liesym/presets.hpp"
#include "liesym/sparsify.hpp"

using namespace liesym;

namespace {

std::string fmt(double v) { return format_real(v); }

GridSpec grid_from_config(const DatasetPreset& preset, const std::string& config_path,
                          int* n_f, int* n_ics, double* ic_scale) {
    GridSpec grid = preset.grid;
    *n_f = preset.n_f;
    *n_ics = preset.n_ics;
    *ic_scale = preset.ic_scale;
    if (config_path.empty()) return grid;
    nlohmann::json cfg = nlohmann::json::parse(read_text_file(config_path));
    if (cfg.contains("L")) grid.L = cfg["L"];
    if (cfg.contains("nx")) grid.nx = cfg["nx"];
    if (cfg.contains("T")) grid.T = cfg["T"];
    if (cfg.contains("nt")) grid.nt = cfg["nt"];
    if (cfg.contains("substeps")) grid.substeps = cfg["substeps"];
    if (cfg.contains("n_f")) *n_f = cfg["n_f"];
    if (cfg.contains("n_ics")) *n_ics = cfg["n_ics"];
    if (cfg.contains("ic_scale")) *ic_scale = cfg["ic_scale"];
    return grid;
}

int cmd_gen(const std::string& pde_name, const std::string& config, uint64_t seed,
            const std::string& out, int space_stride) {
    DatasetPreset preset = dataset_preset(pde_name);
    int n_f, n_ics;
    double ic_scale;
    GridSpec grid = grid_from_config(preset, config, &n_f, &n_ics, &ic_scale);
    PdeSpec pde = builtin_pde(pde_name);
    TrajectoryDataset traj = generate_dataset(pde, grid, n_ics, n_f, ic_scale, seed);
    if (space_stride > 1) traj = subsample(traj, space_stride, 1);
    save_trajectory(traj, out);
    std::cout << "wrote " << out << "/dataset.bin  shape [";
    auto shape = traj.shape();
    for (size_t i = 0; i < shape.size(); ++i) std::cout << (i ? ", " : "") << shape[i];
    std::cout << "]  fingerprint " << hex64(traj.fingerprint()) << "\n";
    return 0;
}

int cmd_jet(const std::string& in, int order, const std::string& out, int space_stride) {
    auto source = file_slice_source(in);
    std::string pde_name = source->pde();
    int stride = space_stride;
    if (stride == 0) stride = source->dims() == 2 ? 10 : 1;
    int effective_order = order;
    if (effective_order == 0) effective_order = dataset_preset(pde_name).order;
    ProlongedDataset ds = estimate_jet(*source, effective_order, stride);
    // attach the preset's declared split when the equation is known
    try {
        DatasetPreset preset = dataset_preset(pde_name);
        ds.s_in = parse_deriv_coords(ds.space, preset.s_in);
        ds.s_out = parse_deriv_coords(ds.space, preset.s_out);
    } catch (const std::invalid_argument&) {
        // custom equation: splits must be declared before training
    }
    save_jets(ds, out);
    std::cout << "wrote " << out << "/jets.bin  points " << ds.num_points()
              << "  channels " << ds.num_channels() << "  order " << ds.order << "\n";
    return 0;
}

int cmd_train(const std::string& in, const std::string& out, MlpConfig cfg) {
    ProlongedDataset ds = load_jets(in);
    TrainReport rep;
    auto mlp = train_mlp(ds, cfg, &rep);
    mlp->save(out, ds.space);
    std::cout << "trained on " << rep.train_points << " points (" << rep.val_points
              << " held out)\n";
    std::cout << "final train mse " << fmt(rep.final_train_loss) << ", validation mse "
              << fmt(rep.final_val_loss) << "\n";
    std::cout << "wrote " << out << "/model.json\n";
    return 0;
}

int cmd_discover(const std::string& jets_dir, const std::string& model_dir,
                 const std::string& analytic, const std::string& library_spec,
                 long samples, double threshold, uint64_t seed, const std::string& out,
                 const std::string& mode) {
    ProlongedDataset ds = load_jets(jets_dir);
    std::shared_ptr<const RhsModel> model;
    if (!model_dir.empty()) {
        JetSpace model_space;
        auto mlp = Mlp::load(model_dir, &model_space);
        if (!(model_space == ds.space))
            throw std::runtime_error("model and jets disagree on the coordinate system");
        for (const JetVar& v : mlp->inputs())
            if (ds.channel_of(v) < 0)
                throw std::runtime_error("model input " + v.name(ds.space) +
                                         " is not a jet channel");
        model = std::shared_ptr<const RhsModel>(mlp.release());
    } else if (!analytic.empty()) {
        model = std::shared_ptr<const RhsModel>(analytic_rhs(analytic, ds.space));
    } else {
        throw std::runtime_error("need either --model or --analytic");
    }

    if (ds.s_out.empty()) throw std::runtime_error("jets carry no declared output split");
    ResidualSpec residual{model, ds.s_out};
    DerivCoordSet rows = residual.default_rows();
    FunctionLibrary lib = make_library(ds.space, library_spec);

    double threshold_eff = threshold;
    if (threshold_eff < 0) threshold_eff = dataset_preset(ds.pde).eps2;
    auto idx = sample_points(ds, samples, seed);
    int unknowns = (ds.space.p() + ds.space.q()) * lib.size();
    bool gram;
    if (mode == "dense")
        gram = false;
    else if (mode == "gram")
        gram = true;
    else
        gram = prefer_gram(samples, residual.num_equations(), unknowns);
    CriterionSystem sys = gram ? accumulate_gram(ds, idx, residual, lib, rows)
                               : build_c(ds, idx, residual, lib, rows);

    DiscoveryResult res;
    res.pde = ds.pde;
    res.library = lib;
    res.rows = rows;
    res.gram = gram;
    res.num_samples = samples;
    res.dataset_fingerprint = ds.fingerprint();
    res.config_echo = {{"jets", jets_dir},
                       {"model", model_dir.empty() ? "analytic:" + analytic : model_dir},
                       {"library", library_spec},
                       {"samples", std::to_string(samples)},
                       {"threshold", fmt(threshold_eff)},
                       {"seed", std::to_string(seed)},
                       {"path", gram ? "gram" : "dense"}};
    res.basis = null_space(sys, threshold_eff);
    save_result(res, out);

    std::cout << spectrum_report(res.basis).to_text();
    for (int i = 0; i < res.basis.d; ++i)
        std::cout << "v" << (i + 1) << " = " << res.basis.expressions[i] << "\n";
    std::cout << "wrote " << out << "\n";
    return 0;
}

int cmd_sparsify(const std::string& in, const std::string& out, LadmapParams params,
                 bool have_eps1, bool have_eps2, double eps1, double eps2) {
    DiscoveryResult res = load_result(in);
    try {
        DatasetPreset preset = dataset_preset(res.pde);
        params.eps1 = preset.ladmap.eps1;
        params.eps2 = preset.ladmap.eps2;
    } catch (const std::invalid_argument&) {
    }
    if (have_eps1) params.eps1 = eps1;
    if (have_eps2) params.eps2 = eps2;
    LadmapDiagnostics diag;
    res.q_sparse = canonicalize_basis(ladmap_sparsify(res.basis.q, params, &diag));
    res.has_sparse = true;
    const int pq = res.library.space.p() + res.library.space.q();
    std::vector<Eigen::MatrixXd> ws;
    for (int i = 0; i < res.q_sparse.cols(); ++i)
        ws.push_back(unstack_coefficients(res.q_sparse.col(i), pq, res.library.size()));
    res.expressions_sparse = render_generators(ws, res.library);
    res.ladmap_diagnostics = {{"iterations", double(diag.iterations)},
                              {"converged", diag.converged ? 1.0 : 0.0},
                              {"feasibility", diag.feasibility},
                              {"step", diag.step},
                              {"objective_initial", diag.objective_initial},
                              {"objective_final", diag.objective_final},
                              {"selected_restart", double(diag.selected_restart)}};
    save_result(res, out);
    if (!diag.converged)
        std::cout << "warning: sparsification hit the iteration cap before the "
                     "tolerances were met\n";
    std::cout << "objective " << fmt(diag.objective_initial) << " -> "
              << fmt(diag.objective_final) << " in " << diag.iterations << " iterations\n";
    for (size_t i = 0; i < res.expressions_sparse.size(); ++i)
        std::cout << "v" << (i + 1) << " = " << res.expressions_sparse[i] << "\n";
    std::cout << "wrote " << out << "\n";
    return 0;
}

int cmd_eval(const std::string& in, const std::string& truth_name, bool linear_mode,
             const std::string& truth_file) {
    DiscoveryResult res = load_result(in);
    Eigen::MatrixXd truth;
    if (!truth_file.empty()) {
        nlohmann::json doc = nlohmann::json::parse(read_text_file(truth_file));
        if (!doc.contains(truth_name))
            throw std::runtime_error("truth file has no entry '" + truth_name + "'");
        const int pq = res.library.space.p() + res.library.space.q();
        Eigen::MatrixXd basis(static_cast<long>(pq) * res.library.size(),
                              static_cast<long>(doc[truth_name].size()));
        long col = 0;
        for (const auto& gen : doc[truth_name]) {
            std::vector<std::pair<std::string, std::string>> comps;
            for (auto it = gen.begin(); it != gen.end(); ++it)
                comps.emplace_back(it.key(), it.value().get<std::string>());
            basis.col(col++) = encode_generator(res.library, comps);
        }
        truth = orthonormalize(basis);
    } else {
        truth = truth_algebra(truth_name, res.library);
    }
    std::cout << "discovered d = " << res.basis.d << ", reference d = " << truth.cols()
              << "\n";
    if (res.basis.d == 0) {
        std::cout << "no generators found\n";
        return 2;
    }
    Eigen::MatrixXd q = res.basis.q;
    if (linear_mode) {
        q = project_linear_part(q, res.library);
        truth = project_linear_part(truth, res.library);
    }
    if (q.cols() != truth.cols()) {
        double contain = subspace_containment(truth.cols() < q.cols() ? truth : q,
                                              truth.cols() < q.cols() ? q : truth);
        std::cout << "dimension mismatch; containment distance of the smaller space "
                  << fmt(contain) << "\n";
        return 2;
    }
    std::cout << "grassmann distance " << fmt(grassmann_distance(q, truth)) << "\n";
    return 0;
}

int cmd_report(const std::string& in) {
    DiscoveryResult res = load_result(in);
    std::cout << "equation: " << res.pde << "\n";
    std::cout << "library (" << res.library.size() << " entries):";
    for (const auto& n : res.library.entry_names()) std::cout << " " << n;
    std::cout << "\nsamples: " << res.num_samples
              << "  path: " << (res.gram ? "gram" : "dense") << "\n";
    std::cout << "dataset fingerprint: " << hex64(res.dataset_fingerprint) << "\n";
    std::cout << spectrum_report(res.basis).to_text();
    if (res.basis.d == 0) return 0;
    std::cout << "generators:\n";
    for (int i = 0; i < res.basis.d; ++i)
        std::cout << "  v" << (i + 1) << " = " << res.basis.expressions[i] << "\n";
    if (res.has_sparse) {
        std::cout << "sparsified generators:\n";
        for (size_t i = 0; i < res.expressions_sparse.size(); ++i)
            std::cout << "  v" << (i + 1) << " = " << res.expressions_sparse[i] << "\n";
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"discovery of point-symmetry generators from trajectory data"};
    app.require_subcommand(1);

    auto* gen = app.add_subcommand("gen", "generate a trajectory dataset");
    std::string gen_pde, gen_config, gen_out;
    uint64_t gen_seed = 1;
    int gen_stride = 1;
    gen->add_option("--pde", gen_pde, "equation name")->required();
    gen->add_option("--config", gen_config, "JSON grid overrides");
    gen->add_option("--seed", gen_seed, "generation seed");
    gen->add_option("--out", gen_out, "output directory")->required();
    gen->add_option("--space-stride", gen_stride, "store every k-th grid node");

    auto* jet = app.add_subcommand("jet", "estimate jet coordinates");
    std::string jet_in, jet_out;
    int jet_order = 0, jet_stride = 0;
    jet->add_option("--in", jet_in, "dataset directory")->required();
    jet->add_option("--order", jet_order, "prolongation order (default: preset)");
    jet->add_option("--out", jet_out, "output directory")->required();
    jet->add_option("--space-stride", jet_stride, "emit every k-th node (default: preset)");

    auto* train = app.add_subcommand("train", "fit the input/output map");
    std::string train_in, train_out, train_act = "sigmoid";
    MlpConfig mlp_cfg;
    mlp_cfg.epochs = 60;
    train->add_option("--in", train_in, "jets directory")->required();
    train->add_option("--hidden", mlp_cfg.hidden_width, "hidden width");
    train->add_option("--layers", mlp_cfg.hidden_layers, "hidden layers");
    train->add_option("--activation", train_act, "sigmoid|relu");
    train->add_option("--lr", mlp_cfg.learning_rate, "learning rate");
    train->add_option("--epochs", mlp_cfg.epochs, "training epochs");
    train->add_option("--batch", mlp_cfg.batch_size, "batch size");
    train->add_option("--seed", mlp_cfg.seed, "training seed");
    train->add_option("--train-points", mlp_cfg.max_train_points,
                      "cap on training points (0 = all)");
    train->add_option("--init-scale", mlp_cfg.init_scale, "weight init multiplier");
    train->add_option("--out", train_out, "output directory")->required();

    auto* disc = app.add_subcommand("discover", "solve for the generator basis");
    std::string disc_jets, disc_model, disc_analytic, disc_lib = "poly2", disc_out,
                disc_mode = "auto";
    long disc_samples = 100;
    double disc_threshold = -1;
    uint64_t disc_seed = 0;
    disc->add_option("--jets", disc_jets, "jets directory")->required();
    disc->add_option("--model", disc_model, "trained model directory");
    disc->add_option("--analytic", disc_analytic, "built-in closed-form residual");
    disc->add_option("--library", disc_lib, "polyN | linear | affine | @file.json");
    disc->add_option("--samples", disc_samples, "points sampled for the criterion");
    disc->add_option("--threshold", disc_threshold,
                     "singular value threshold (default: preset)");
    disc->add_option("--seed", disc_seed, "sampling seed");
    disc->add_option("--mode", disc_mode, "auto | dense | gram");
    disc->add_option("--out", disc_out, "result JSON path")->required();

    auto* sp = app.add_subcommand("sparsify", "rotate the basis toward sparsity");
    std::string sp_in, sp_out;
    LadmapParams sp_params;
    double sp_eps1 = 0, sp_eps2 = 0;
    sp->add_option("--in", sp_in, "result JSON")->required();
    sp->add_option("--out", sp_out, "output JSON")->required();
    auto* o1 = sp->add_option("--eps1", sp_eps1, "feasibility tolerance");
    auto* o2 = sp->add_option("--eps2", sp_eps2, "step tolerance");
    sp->add_option("--beta0", sp_params.beta0, "initial penalty");
    sp->add_option("--max-iterations", sp_params.max_iterations, "iteration cap");
    sp->add_option("--restarts", sp_params.restarts, "seeded restarts");

    auto* ev = app.add_subcommand("eval", "compare against a reference algebra");
    std::string ev_in, ev_truth, ev_truth_file;
    bool ev_linear = false;
    ev->add_option("--in", ev_in, "result JSON")->required();
    ev->add_option("--truth", ev_truth, "reference algebra name")->required();
    ev->add_option("--truth-file", ev_truth_file, "custom reference JSON");
    ev->add_flag("--linear", ev_linear, "compare degree-1 parts only");

    auto* rep = app.add_subcommand("report", "print a result file");
    std::string rep_in;
    rep->add_option("--in", rep_in, "result JSON")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (gen->parsed())
            return cmd_gen(gen_pde, gen_config, gen_seed, gen_out, gen_stride);
        if (jet->parsed()) return cmd_jet(jet_in, jet_order, jet_out, jet_stride);
        if (train->parsed()) {
            mlp_cfg.activation =
                train_act == "relu" ? Activation::relu : Activation::sigmoid;
            return cmd_train(train_in, train_out, mlp_cfg);
        }
        if (disc->parsed())
            return cmd_discover(disc_jets, disc_model, disc_analytic, disc_lib,
                                disc_samples, disc_threshold, disc_seed, disc_out,
                                disc_mode);
        if (sp->parsed())
            return cmd_sparsify(sp_in, sp_out, sp_params, o1->count() > 0,
                                o2->count() > 0, sp_eps1, sp_eps2);
        if (ev->parsed()) return cmd_eval(ev_in, ev_truth, ev_linear, ev_truth_file);
        if (rep->parsed()) return cmd_report(rep_in);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}

#include "liesym/surrogate.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <numeric>
#include <stdexcept>

#include "json.hpp"
#include "liesym/prolong.hpp"

namespace liesym {

void MlpConfig::validate() const {
    if (hidden_width < 1) throw std::invalid_argument("hidden width must be >= 1");
    if (hidden_layers < 1) throw std::invalid_argument("need at least one hidden layer");
    if (learning_rate <= 0) throw std::invalid_argument("learning rate must be positive");
    if (batch_size < 1) throw std::invalid_argument("batch size must be >= 1");
    if (epochs < 0) throw std::invalid_argument("epochs must be >= 0");
    if (val_fraction < 0 || val_fraction >= 1)
        throw std::invalid_argument("validation fraction must be in [0, 1)");
}

namespace {

inline double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

template <typename M>
void apply_activation(M& z, Activation act) {
    using S = typename M::Scalar;
    if (act == Activation::sigmoid)
        z = z.unaryExpr([](S v) { return S(1) / (S(1) + std::exp(-v)); });
    else
        z = z.cwiseMax(S(0));
}

template <typename M>
M activation_grad(const M& a, Activation act) {
    using S = typename M::Scalar;
    if (act == Activation::sigmoid) return (a.array() * (S(1) - a.array())).matrix();
    return (a.array() > S(0)).template cast<S>().matrix();
}

// Adan optimizer state for one parameter tensor.
template <typename M>
struct AdanState {
    M m, v, n, prev_grad;
    void init(long rows, long cols) {
        m = M::Zero(rows, cols);
        v = M::Zero(rows, cols);
        n = M::Zero(rows, cols);
        prev_grad = M::Zero(rows, cols);
    }
};

struct Adan {
    double b1 = 0.02, b2 = 0.08, b3 = 0.01, eps = 1e-8;
    long step = 0;

    template <typename M>
    void update(M& param, const M& grad, AdanState<M>& st, double lr) const {
        using S = typename M::Scalar;
        M diff = step == 1 ? M::Zero(grad.rows(), grad.cols()).eval()
                           : (grad - st.prev_grad).eval();
        st.m = S(1 - b1) * st.m + S(b1) * grad;
        st.v = S(1 - b2) * st.v + S(b2) * diff;
        M g_hat = grad + S(1 - b2) * diff;
        st.n = (S(1 - b3) * st.n.array() + S(b3) * g_hat.array().square()).matrix();
        S bc1 = S(1 - std::pow(1 - b1, double(step)));
        S bc2 = S(1 - std::pow(1 - b2, double(step)));
        S bc3 = S(1 - std::pow(1 - b3, double(step)));
        auto denom = (st.n.array() / bc3).sqrt() + S(eps);
        param.array() -=
            S(lr) * (st.m.array() / bc1 + S(1 - b2) * st.v.array() / bc2) / denom;
        st.prev_grad = grad;
    }
};

}  // namespace

Mlp::Mlp(std::vector<JetVar> in, std::vector<JetVar> out, const MlpConfig& cfg)
    : in_(std::move(in)), out_(std::move(out)), cfg_(cfg) {
    cfg_.validate();
    if (in_.empty() || out_.empty())
        throw std::invalid_argument("model needs at least one input and one output");
    init_params();
}

void Mlp::init_params() {
    std::vector<long> sizes;
    sizes.push_back(static_cast<long>(in_.size()));
    for (int l = 0; l < cfg_.hidden_layers; ++l) sizes.push_back(cfg_.hidden_width);
    sizes.push_back(static_cast<long>(out_.size()));
    GaussianRng rng(cfg_.seed ^ 0x5f3759df);
    w_.clear();
    b_.clear();
    for (size_t l = 0; l + 1 < sizes.size(); ++l) {
        double bound = cfg_.init_scale / std::sqrt(double(sizes[l]));
        Eigen::MatrixXd w(sizes[l + 1], sizes[l]);
        Eigen::VectorXd b(sizes[l + 1]);
        for (long i = 0; i < w.rows(); ++i)
            for (long j = 0; j < w.cols(); ++j) w(i, j) = (2 * rng.uniform() - 1) * bound;
        for (long i = 0; i < b.size(); ++i) b(i) = (2 * rng.uniform() - 1) * bound;
        w_.push_back(std::move(w));
        b_.push_back(std::move(b));
    }
}

Eigen::MatrixXd Mlp::eval_batch(const Eigen::MatrixXd& x) const {
    if (x.cols() != static_cast<long>(in_.size()))
        throw std::invalid_argument("input width mismatch");
    Eigen::MatrixXd a = x;
    for (size_t l = 0; l < w_.size(); ++l) {
        Eigen::MatrixXd z = a * w_[l].transpose();
        z.rowwise() += b_[l].transpose();
        if (l + 1 < w_.size()) apply_activation(z, cfg_.activation);
        a = std::move(z);
    }
    return a;
}

Eigen::VectorXd Mlp::eval(const Eigen::VectorXd& in) const {
    return eval_batch(in.transpose()).row(0);
}

Eigen::MatrixXd Mlp::jacobian(const Eigen::VectorXd& in) const {
    if (in.size() != static_cast<long>(in_.size()))
        throw std::invalid_argument("input width mismatch");
    std::vector<Eigen::VectorXd> acts;
    Eigen::VectorXd a = in;
    for (size_t l = 0; l + 1 < w_.size(); ++l) {
        Eigen::VectorXd z = w_[l] * a + b_[l];
        if (cfg_.activation == Activation::sigmoid)
            z = z.unaryExpr([](double v) { return sigmoid(v); });
        else
            z = z.cwiseMax(0.0);
        acts.push_back(z);
        a = z;
    }
    // exact chain rule through the layers
    Eigen::MatrixXd jac = w_.back();
    for (size_t l = w_.size() - 1; l-- > 0;) {
        const Eigen::VectorXd& act = acts[l];
        Eigen::VectorXd g = cfg_.activation == Activation::sigmoid
                                ? (act.array() * (1.0 - act.array())).matrix().eval()
                                : (act.array() > 0.0).cast<double>().matrix().eval();
        jac = (jac * g.asDiagonal()) * w_[l];
    }
    return jac;
}

TrainReport Mlp::train(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y) {
    if (x.rows() != y.rows()) throw std::invalid_argument("sample count mismatch");
    const long n = x.rows();
    GaussianRng rng(cfg_.seed ^ 0x9e3779b9);

    // deterministic shuffle, then validation split and optional training cap
    std::vector<long> order(n);
    std::iota(order.begin(), order.end(), 0);
    for (long i = n - 1; i > 0; --i)
        std::swap(order[i], order[rng.next_u64() % static_cast<uint64_t>(i + 1)]);
    long n_val = static_cast<long>(std::floor(cfg_.val_fraction * n));
    long n_train = n - n_val;
    if (cfg_.max_train_points > 0) n_train = std::min(n_train, cfg_.max_train_points);

    Eigen::MatrixXd xt(n_train, x.cols()), yt(n_train, y.cols());
    for (long i = 0; i < n_train; ++i) {
        xt.row(i) = x.row(order[i]);
        yt.row(i) = y.row(order[i]);
    }
    Eigen::MatrixXd xv(n_val, x.cols()), yv(n_val, y.cols());
    for (long i = 0; i < n_val; ++i) {
        xv.row(i) = x.row(order[n - n_val + i]);
        yv.row(i) = y.row(order[n - n_val + i]);
    }

    Adan opt;
    std::vector<AdanState> wst(w_.size()), bst(w_.size());
    for (size_t l = 0; l < w_.size(); ++l) {
        wst[l].init(w_[l].rows(), w_[l].cols());
        bst[l].init(b_[l].size(), 1);
    }

    const long batches = (n_train + cfg_.batch_size - 1) / cfg_.batch_size;
    const long total_steps = std::max<long>(1, cfg_.epochs * batches);
    std::vector<long> perm(n_train);
    std::iota(perm.begin(), perm.end(), 0);
    double last_train_loss = 0;

    std::vector<Eigen::MatrixXd> a(w_.size() + 1);
    for (int epoch = 0; epoch < cfg_.epochs; ++epoch) {
        for (long i = n_train - 1; i > 0; --i)
            std::swap(perm[i], perm[rng.next_u64() % static_cast<uint64_t>(i + 1)]);
        double epoch_loss = 0;
        for (long bstart = 0; bstart < n_train; bstart += cfg_.batch_size) {
            long bsz = std::min<long>(cfg_.batch_size, n_train - bstart);
            Eigen::MatrixXd xb(bsz, x.cols()), yb(bsz, y.cols());
            for (long i = 0; i < bsz; ++i) {
                xb.row(i) = xt.row(perm[bstart + i]);
                yb.row(i) = yt.row(perm[bstart + i]);
            }
            a[0] = xb;
            for (size_t l = 0; l < w_.size(); ++l) {
                Eigen::MatrixXd z = a[l] * w_[l].transpose();
                z.rowwise() += b_[l].transpose();
                if (l + 1 < w_.size()) apply_activation(z, cfg_.activation);
                a[l + 1] = std::move(z);
            }
            Eigen::MatrixXd delta;
            double loss;
            if (cfg_.classification) {
                Eigen::ArrayXXd prob =
                    a.back().unaryExpr([](double v) { return sigmoid(v); }).array();
                loss = -((yb.array() * prob.log()) +
                         (1 - yb.array()) * (1 - prob).log())
                            .mean();
                delta = (prob - yb.array()).matrix() / double(bsz);
            } else {
                Eigen::MatrixXd err = a.back() - yb;
                loss = err.squaredNorm() / double(bsz * y.cols());
                delta = 2.0 * err / double(bsz * y.cols());
            }
            if (!std::isfinite(loss))
                throw std::runtime_error("training diverged: non-finite loss at epoch " +
                                         std::to_string(epoch));
            epoch_loss += loss * bsz;

            ++opt.step;
            double lr = cfg_.learning_rate;
            if (cfg_.schedule == LrSchedule::cosine)
                lr *= 0.5 * (1.0 + std::cos(M_PI * double(opt.step - 1) / total_steps));

            for (size_t l = w_.size(); l-- > 0;) {
                Eigen::MatrixXd gw = delta.transpose() * a[l];
                Eigen::MatrixXd gb = delta.colwise().sum().transpose();
                if (l > 0)
                    delta = (delta * w_[l])
                                .cwiseProduct(activation_grad(a[l], cfg_.activation));
                opt.update(w_[l], gw, wst[l], lr);
                Eigen::MatrixXd bias = b_[l];
                opt.update(bias, gb, bst[l], lr);
                b_[l] = bias.col(0);
            }
        }
        last_train_loss = epoch_loss / double(n_train);
    }

    TrainReport rep;
    rep.train_points = n_train;
    rep.val_points = n_val;
    rep.final_train_loss = last_train_loss;
    if (n_val > 0) {
        Eigen::MatrixXd pv = eval_batch(xv);
        if (cfg_.classification) {
            Eigen::ArrayXXd prob = pv.unaryExpr([](double v) { return sigmoid(v); }).array();
            rep.final_val_loss =
                -((yv.array() * prob.log()) + (1 - yv.array()) * (1 - prob).log()).mean();
        } else {
            rep.final_val_loss = (pv - yv).squaredNorm() / double(n_val * y.cols());
        }
    }
    return rep;
}

std::unique_ptr<Mlp> train_mlp(const ProlongedDataset& ds, const MlpConfig& cfg,
                               TrainReport* report) {
    if (ds.s_in.empty() || ds.s_out.empty())
        throw std::invalid_argument("dataset has no input/output split declared");
    long n = ds.num_points();
    Eigen::MatrixXd x(n, ds.s_in.size()), y(n, ds.s_out.size());
    std::vector<int> in_ch, out_ch;
    for (const JetVar& v : ds.s_in) in_ch.push_back(ds.channel_of(v));
    for (const JetVar& v : ds.s_out) out_ch.push_back(ds.channel_of(v));
    for (long i = 0; i < n; ++i) {
        for (size_t c = 0; c < in_ch.size(); ++c) x(i, c) = ds.value(i, in_ch[c]);
        for (size_t c = 0; c < out_ch.size(); ++c) y(i, c) = ds.value(i, out_ch[c]);
    }
    auto mlp = std::make_unique<Mlp>(ds.s_in, ds.s_out, cfg);
    TrainReport rep = mlp->train(x, y);
    if (report) *report = rep;
    return mlp;
}

void Mlp::save(const std::string& dir, const JetSpace& space) const {
    std::filesystem::create_directories(dir);
    nlohmann::json meta;
    meta["version"] = 1;
    meta["kind"] = "mlp";
    meta["coords"] = space.coords;
    meta["fields"] = space.fields;
    auto names = [&](const std::vector<JetVar>& vars) {
        std::vector<std::string> out;
        for (const JetVar& v : vars) out.push_back(v.name(space));
        return out;
    };
    meta["inputs"] = names(in_);
    meta["outputs"] = names(out_);
    meta["hidden_layers"] = cfg_.hidden_layers;
    meta["hidden_width"] = cfg_.hidden_width;
    meta["activation"] = cfg_.activation == Activation::sigmoid ? "sigmoid" : "relu";
    meta["classification"] = cfg_.classification;
    meta["seed"] = cfg_.seed;
    std::vector<double> blob;
    for (size_t l = 0; l < w_.size(); ++l) {
        for (long i = 0; i < w_[l].rows(); ++i)
            for (long j = 0; j < w_[l].cols(); ++j) blob.push_back(w_[l](i, j));
        for (long i = 0; i < b_[l].size(); ++i) blob.push_back(b_[l](i));
    }
    write_f64_file(dir + "/model.bin", blob);
    write_text_file(dir + "/model.json", meta.dump(2) + "\n");
}

std::unique_ptr<Mlp> Mlp::load(const std::string& dir, JetSpace* space_out) {
    nlohmann::json meta = nlohmann::json::parse(read_text_file(dir + "/model.json"));
    JetSpace space = make_space(meta.at("coords").get<std::vector<std::string>>(),
                                meta.at("fields").get<std::vector<std::string>>());
    MlpConfig cfg;
    cfg.hidden_layers = meta.at("hidden_layers");
    cfg.hidden_width = meta.at("hidden_width");
    cfg.activation =
        meta.at("activation") == "sigmoid" ? Activation::sigmoid : Activation::relu;
    cfg.classification = meta.at("classification");
    cfg.seed = meta.at("seed");
    std::vector<JetVar> in, out;
    for (const auto& n : meta.at("inputs")) in.push_back(JetVar::parse(space, n));
    for (const auto& n : meta.at("outputs")) out.push_back(JetVar::parse(space, n));
    auto mlp = std::make_unique<Mlp>(in, out, cfg);
    std::vector<double> blob = read_f64_file(dir + "/model.bin");
    size_t pos = 0;
    for (size_t l = 0; l < mlp->w_.size(); ++l) {
        for (long i = 0; i < mlp->w_[l].rows(); ++i)
            for (long j = 0; j < mlp->w_[l].cols(); ++j) mlp->w_[l](i, j) = blob.at(pos++);
        for (long i = 0; i < mlp->b_[l].size(); ++i) mlp->b_[l](i) = blob.at(pos++);
    }
    if (pos != blob.size()) throw std::runtime_error("model.bin size mismatch in " + dir);
    if (space_out) *space_out = space;
    return mlp;
}

std::unique_ptr<RhsModel> analytic_rhs(const std::string& name, const JetSpace& space) {
    auto vars = [&](const std::vector<std::string>& names) {
        std::vector<JetVar> out;
        for (const auto& n : names) out.push_back(JetVar::parse(space, n));
        return out;
    };
    auto model = [&](const std::vector<std::string>& in_names,
                     const std::vector<std::string>& out_names, CallableRhs::Fn fn,
                     CallableRhs::JacFn jac) -> std::unique_ptr<RhsModel> {
        return std::make_unique<CallableRhs>(vars(in_names), vars(out_names),
                                             std::move(fn), std::move(jac));
    };
    using V = Eigen::VectorXd;
    using M = Eigen::MatrixXd;

    if (name == "burgers") {
        return model(
            {"u", "u_x", "u_xx"}, {"u_t"},
            [](const V& z) { return V::Constant(1, z(2) + z(1) * z(1)); },
            [](const V& z) {
                M j(1, 3);
                j << 0, 2 * z(1), 1;
                return j;
            });
    }
    if (name == "heat") {
        return model(
            {"u", "u_x", "u_xx"}, {"u_t"},
            [](const V& z) { return V::Constant(1, z(2)); },
            [](const V&) {
                M j(1, 3);
                j << 0, 0, 1;
                return j;
            });
    }
    if (name == "kdv") {
        return model(
            {"u", "u_x", "u_xx", "u_xxx"}, {"u_t"},
            [](const V& z) { return V::Constant(1, -z(3) - z(0) * z(1)); },
            [](const V& z) {
                M j(1, 4);
                j << -z(1), -z(0), 0, -1;
                return j;
            });
    }
    if (name == "wave2d") {
        return model(
            {"u", "u_x", "u_y", "u_xx", "u_yy", "u_xy"}, {"u_tt"},
            [](const V& z) { return V::Constant(1, z(3) + z(4)); },
            [](const V&) {
                M j(1, 6);
                j << 0, 0, 0, 1, 1, 0;
                return j;
            });
    }
    if (name == "schrodinger2d") {
        return model(
            {"u", "u_x", "u_y", "u_xx", "u_yy", "u_xy", "v", "v_x", "v_y", "v_xx",
             "v_yy", "v_xy"},
            {"u_t", "v_t"},
            [](const V& z) {
                double u = z(0), v = z(6);
                double a2 = u * u + v * v;
                V f(2);
                f(0) = -0.5 * (z(9) + z(10)) + v * a2;
                f(1) = 0.5 * (z(3) + z(4)) - u * a2;
                return f;
            },
            [](const V& z) {
                double u = z(0), v = z(6);
                M j = M::Zero(2, 12);
                j(0, 0) = 2 * u * v;
                j(0, 6) = u * u + 3 * v * v;
                j(0, 9) = -0.5;
                j(0, 10) = -0.5;
                j(1, 0) = -(3 * u * u + v * v);
                j(1, 3) = 0.5;
                j(1, 4) = 0.5;
                j(1, 6) = -2 * u * v;
                return j;
            });
    }
    if (name == "rd2d") {
        constexpr double d1 = 0.1, d2 = 0.1, beta = 1.0;
        return model(
            {"u", "u_x", "u_y", "u_xx", "u_yy", "u_xy", "v", "v_x", "v_y", "v_xx",
             "v_yy", "v_xy"},
            {"u_t", "v_t"},
            [=](const V& z) {
                double u = z(0), v = z(6);
                double a2 = u * u + v * v;
                V f(2);
                f(0) = (1 - a2) * u + beta * a2 * v + d1 * (z(3) + z(4));
                f(1) = -beta * a2 * u + (1 - a2) * v + d2 * (z(9) + z(10));
                return f;
            },
            [=](const V& z) {
                double u = z(0), v = z(6);
                M j = M::Zero(2, 12);
                j(0, 0) = 1 - 3 * u * u - v * v + 2 * beta * u * v;
                j(0, 6) = -2 * u * v + beta * (u * u + 3 * v * v);
                j(0, 3) = d1;
                j(0, 4) = d1;
                j(1, 0) = -beta * (3 * u * u + v * v) - 2 * u * v;
                j(1, 6) = -2 * beta * u * v + 1 - u * u - 3 * v * v;
                j(1, 9) = d2;
                j(1, 10) = d2;
                return j;
            });
    }
    std::string options;
    for (const auto& n : builtin_pde_names()) options += (options.empty() ? "" : ", ") + n;
    throw std::invalid_argument("unknown analytic right-hand side '" + name +
                                "'; options: " + options);
}

DerivCoordSet ResidualSpec::default_rows() const {
    DerivCoordSet rows = model->inputs();
    for (const JetVar& v : subtracted) rows.push_back(v);
    return rows;
}

Eigen::VectorXd ResidualSpec::gather_inputs(const PointRef& pt) const {
    Eigen::VectorXd in(model->num_inputs());
    for (int i = 0; i < model->num_inputs(); ++i) in(i) = pt.at(model->inputs()[i]);
    return in;
}

Eigen::VectorXd ResidualSpec::residual(const PointRef& pt) const {
    Eigen::VectorXd f = model->eval(gather_inputs(pt));
    for (size_t k = 0; k < subtracted.size(); ++k) f(k) -= pt.at(subtracted[k]);
    return f;
}

Eigen::MatrixXd ResidualSpec::residual_jacobian(const PointRef& pt,
                                                const DerivCoordSet& rows) const {
    if (!subtracted.empty() &&
        subtracted.size() != static_cast<size_t>(model->num_outputs()))
        throw std::invalid_argument("subtracted coordinate count must match model outputs");
    Eigen::MatrixXd jf = model->jacobian(gather_inputs(pt));
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(model->num_outputs(), rows.size());
    for (size_t c = 0; c < rows.size(); ++c) {
        for (int i = 0; i < model->num_inputs(); ++i)
            if (model->inputs()[i] == rows[c]) out.col(c) += jf.col(i);
        for (size_t k = 0; k < subtracted.size(); ++k)
            if (subtracted[k] == rows[c]) out(k, c) -= 1.0;
    }
    return out;
}

}  // namespace liesym

#ifndef LIESYM_SURROGATE_HPP
#define LIESYM_SURROGATE_HPP

#include <Eigen/Core>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "liesym/jetdata.hpp"
#include "liesym/prolong.hpp"

namespace liesym {

// Differentiable map from a list of jet coordinates to a list of outputs.
// jacobian() must be the exact derivative of eval().
class RhsModel {
public:
    virtual ~RhsModel() = default;
    virtual const std::vector<JetVar>& inputs() const = 0;
    virtual const std::vector<JetVar>& outputs() const = 0;
    virtual Eigen::VectorXd eval(const Eigen::VectorXd& in) const = 0;
    virtual Eigen::MatrixXd jacobian(const Eigen::VectorXd& in) const = 0;
    int num_inputs() const { return static_cast<int>(inputs().size()); }
    int num_outputs() const { return static_cast<int>(outputs().size()); }
};

enum class Activation { sigmoid, relu };
enum class LrSchedule { constant, cosine };

struct MlpConfig {
    int hidden_layers = 3;
    int hidden_width = 200;
    Activation activation = Activation::sigmoid;
    double learning_rate = 1e-3;
    int batch_size = 256;
    int epochs = 200;
    uint64_t seed = 0;
    double val_fraction = 0.1;
    long max_train_points = 0;  // 0 = use everything
    LrSchedule schedule = LrSchedule::cosine;
    double init_scale = 1.0;  // multiplier on the uniform init bound
    bool classification = false;  // logistic loss; eval() returns the logit
    void validate() const;
};

struct TrainReport {
    double final_train_loss = 0.0;
    double final_val_loss = 0.0;
    long train_points = 0;
    long val_points = 0;
};

// Fully-connected network trained with the Adan optimizer. Deterministic for
// a fixed (data, config) pair.
class Mlp : public RhsModel {
public:
    Mlp(std::vector<JetVar> in, std::vector<JetVar> out, const MlpConfig& cfg);

    const std::vector<JetVar>& inputs() const override { return in_; }
    const std::vector<JetVar>& outputs() const override { return out_; }
    Eigen::VectorXd eval(const Eigen::VectorXd& in) const override;
    Eigen::MatrixXd jacobian(const Eigen::VectorXd& in) const override;

    // Row-major batches: X is n x in, Y is n x out.
    Eigen::MatrixXd eval_batch(const Eigen::MatrixXd& x) const;
    TrainReport train(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y);

    const MlpConfig& config() const { return cfg_; }
    const std::vector<Eigen::MatrixXd>& weights() const { return w_; }
    const std::vector<Eigen::VectorXd>& biases() const { return b_; }

    void save(const std::string& dir, const JetSpace& space) const;
    static std::unique_ptr<Mlp> load(const std::string& dir, JetSpace* space_out = nullptr);

private:
    std::vector<JetVar> in_, out_;
    MlpConfig cfg_;
    std::vector<Eigen::MatrixXd> w_;  // layer l: (out_l x in_l)
    std::vector<Eigen::VectorXd> b_;
    void init_params();
};

// Trains an MLP on the declared input/output split of a prolonged dataset.
std::unique_ptr<Mlp> train_mlp(const ProlongedDataset& ds, const MlpConfig& cfg,
                               TrainReport* report = nullptr);

// Closed-form right-hand sides of the built-in equations, with hand-written
// Jacobians; bypasses training for oracle pipelines.
std::unique_ptr<RhsModel> analytic_rhs(const std::string& name, const JetSpace& space);

// Generic analytic model for tests and static problems.
class CallableRhs : public RhsModel {
public:
    using Fn = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;
    using JacFn = std::function<Eigen::MatrixXd(const Eigen::VectorXd&)>;
    CallableRhs(std::vector<JetVar> in, std::vector<JetVar> out, Fn fn, JacFn jac)
        : in_(std::move(in)), out_(std::move(out)), fn_(std::move(fn)), jac_(std::move(jac)) {}
    const std::vector<JetVar>& inputs() const override { return in_; }
    const std::vector<JetVar>& outputs() const override { return out_; }
    Eigen::VectorXd eval(const Eigen::VectorXd& in) const override { return fn_(in); }
    Eigen::MatrixXd jacobian(const Eigen::VectorXd& in) const override { return jac_(in); }

private:
    std::vector<JetVar> in_, out_;
    Fn fn_;
    JacFn jac_;
};

// Residual F = f(S_in) - S_out (or F = f itself when nothing is subtracted),
// with its Jacobian laid out over an ordered derivative-coordinate set.
struct ResidualSpec {
    std::shared_ptr<const RhsModel> model;
    std::vector<JetVar> subtracted;  // S_out; may be empty for static systems

    int num_equations() const { return model->num_outputs(); }
    // model inputs followed by subtracted outputs
    DerivCoordSet default_rows() const;
    Eigen::VectorXd gather_inputs(const PointRef& pt) const;
    Eigen::VectorXd residual(const PointRef& pt) const;
    Eigen::MatrixXd residual_jacobian(const PointRef& pt, const DerivCoordSet& rows) const;
};

}  // namespace liesym

#endif

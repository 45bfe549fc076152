#ifndef MPRIM_BEHAVIOR_HPP
#define MPRIM_BEHAVIOR_HPP

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace mprim {

/// Reserved label for frames where a group has no active primitive.
inline const std::string kNoPrimitiveLabel = "none";

/// Deterministic injective embedding of primitive names into (0,1).
class PrimitiveEmbedding {
public:
    PrimitiveEmbedding() = default;

    /// Seeded pseudo-uniform draw per label, keyed by label text; collisions
    /// resolved by re-draw so the map is injective.
    static PrimitiveEmbedding build(const std::vector<std::string>& vocabulary,
                                    std::uint64_t seed);

    double at(const std::string& label) const;  // throws UnknownClassRef on miss
    const std::map<std::string, double>& map() const { return map_; }

    /// Restore from a serialized label -> value map.
    static PrimitiveEmbedding from_map(std::map<std::string, double> m);

private:
    std::map<std::string, double> map_;
};

using BehaviorFeature = Eigen::Matrix<double, 6, 1>;

struct BehaviorSample {
    BehaviorFeature x;
    int y = 0;  // +1 dangerous, -1 normal
    long frame = 0;
    int subject = 0;
};

/// Per-frame active primitive labels of one subject, one entry per group.
struct PrimitiveTimeline {
    int subject = 0;
    std::vector<std::array<std::string, 6>> frames;
};

/// Emit one sample per subject per frame where at least one group's label
/// differs from the previous frame (the first frame always emits).
std::vector<BehaviorSample> frames_to_samples(const std::vector<PrimitiveTimeline>& timelines,
                                              const PrimitiveEmbedding& embedding,
                                              int label);

/// Soft-margin RBF-kernel SVM trained by sequential minimal optimization.
struct SvmModel {
    std::vector<BehaviorFeature> support_vectors;
    std::vector<double> coefficients;  // alpha_i * y_i
    double bias = 0.0;
    double eta_k = 1.0 / 6.0;  // RBF width
    double lambda = 10.0;      // box constraint

    double decision(const BehaviorFeature& x) const;
};

struct SvmOptions {
    double lambda = 10.0;
    double eta_k = 1.0 / 6.0;
    double tol = 1e-3;
    int max_passes = 200;
    std::uint64_t seed = 0;
};

/// Throws SingleClassData when only one label is present; NonConvergence at
/// the iteration cap.
SvmModel train_svm(const std::vector<BehaviorSample>& samples, const SvmOptions& opts);

/// Platt sigmoid calibrator: p = 1/(1 + exp(A f + B)).
struct PlattCalibrator {
    double a = 0.0;
    double b = 0.0;

    double probability(double score) const;
};

/// Damped-Newton maximum-likelihood fit with the (N+1)/(N+2)-style soft
/// targets; the NLL is non-increasing across iterations by backtracking.
PlattCalibrator platt_fit(const std::vector<double>& scores, const std::vector<int>& labels);

/// Frame-level danger probability: per-subject Platt probabilities averaged
/// with weights obtained by min-max remapping the scores to sum to one
/// (uniform when all scores are equal).
double danger_probability(const std::vector<double>& subject_scores,
                          const PlattCalibrator& calibrator);

struct RocPoint {
    double fpr = 0.0;
    double tpr = 0.0;
};

struct RocCurve {
    std::vector<RocPoint> points;
    double auc = 0.0;
};

/// Threshold sweep over the unique scores, AUC by trapezoid rule.
/// Throws SingleClassData.
RocCurve roc_auc(const std::vector<double>& probabilities, const std::vector<int>& labels);

struct BehaviorModel {
    SvmModel svm;
    PlattCalibrator platt;
    PrimitiveEmbedding embedding;
};

void serialize_behavior_model(const BehaviorModel& model, std::ostream& out);
BehaviorModel parse_behavior_model(std::istream& in);

/// Samples CSV: subject,frame,g1,...,g6,label.
void write_samples_csv(const std::vector<BehaviorSample>& samples, std::ostream& out);
std::vector<BehaviorSample> read_samples_csv(std::istream& in);

}  // namespace mprim

#endif

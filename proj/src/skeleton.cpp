#include "mprim/skeleton.hpp"

#include <Eigen/Geometry>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <json.hpp>

#include "mprim/errors.hpp"
#include "mprim/spline.hpp"

namespace mprim {

using nlohmann::json;

Se3Transform Se3Transform::inverse() const {
    Se3Transform out;
    out.rotation = rotation.transpose();
    out.translation = -out.rotation * translation;
    return out;
}

Se3Transform Se3Transform::operator*(const Se3Transform& rhs) const {
    Se3Transform out;
    out.rotation = rotation * rhs.rotation;
    out.translation = rotation * rhs.translation + translation;
    return out;
}

bool Se3Transform::is_valid_rotation(double tol) const {
    const double ortho = (rotation.transpose() * rotation - Eigen::Matrix3d::Identity()).norm();
    return ortho <= tol && std::abs(rotation.determinant() - 1.0) <= tol;
}

SkeletonSpec::SkeletonSpec() {
    // Groups of 3, inner -> outer; the inner joint is the group parent.
    const struct { const char* name; int group; const char* parent; } table[] = {
        {"lowerneck", 1, "lowerneck"}, {"upperneck", 1, "lowerneck"}, {"head", 1, "lowerneck"},
        {"root", 2, "root"},           {"lowerback", 2, "root"},      {"upperback", 2, "root"},
        {"rclavicle", 3, "rclavicle"}, {"relbow", 3, "rclavicle"},    {"rwrist", 3, "rclavicle"},
        {"lclavicle", 4, "lclavicle"}, {"lelbow", 4, "lclavicle"},    {"lwrist", 4, "lclavicle"},
        {"rfemur", 5, "rfemur"},       {"rtibia", 5, "rfemur"},       {"rfoot", 5, "rfemur"},
        {"lfemur", 6, "lfemur"},       {"ltibia", 6, "lfemur"},       {"lfoot", 6, "lfemur"},
    };
    for (const auto& row : table) joints_.push_back({row.name, row.group, row.parent});
    root_ = "root";
}

const SkeletonSpec& SkeletonSpec::canonical() {
    static const SkeletonSpec spec;
    return spec;
}

int SkeletonSpec::joint_index(const std::string& name) const {
    for (std::size_t i = 0; i < joints_.size(); ++i)
        if (joints_[i].name == name) return static_cast<int>(i);
    return -1;
}

std::array<int, kJointsPerGroup> SkeletonSpec::group_joints(int group) const {
    if (group < 1 || group > kNumGroups) throw OutOfDomain("group id out of range");
    std::array<int, kJointsPerGroup> out{};
    int n = 0;
    for (std::size_t i = 0; i < joints_.size(); ++i)
        if (joints_[i].group == group) out[n++] = static_cast<int>(i);
    return out;
}

int SkeletonSpec::group_parent(int group) const {
    return joint_index(joints_[group_joints(group)[0]].parent);
}

std::pair<int, int> SkeletonSpec::direction_anchors(int group) const {
    if (group < 1 || group > kNumGroups) throw OutOfDomain("group id out of range");
    if (group == 1 || group == 3 || group == 4)
        return {joint_index("lowerneck"), joint_index("upperneck")};
    return {joint_index("root"), joint_index("lowerback")};
}

namespace {

Eigen::Matrix3d quat_to_matrix(double w, double x, double y, double z) {
    Eigen::Quaterniond q(w, x, y, z);
    const double n = q.norm();
    if (!std::isfinite(n) || n < 1e-9) throw MalformedInput("degenerate quaternion");
    return q.normalized().toRotationMatrix();
}

void validate_sequence(const SkeletonSequence& seq) {
    if (seq.rate <= 0) throw MalformedInput("rate must be positive");
    if (seq.frames.size() < 2) throw MalformedInput("sequence needs at least 2 frames");
    for (const auto& frame : seq.frames)
        for (const auto& joint : frame.joints) {
            if (!joint.translation.allFinite() || !joint.rotation.allFinite())
                throw MalformedInput("non-finite joint transform");
            if (!joint.is_valid_rotation(1e-6))
                throw MalformedInput("rotation fails orthonormality tolerance");
        }
}

double to_finite(const json& v, const char* what) {
    if (!v.is_number()) throw MalformedInput(std::string("expected number for ") + what);
    const double x = v.get<double>();
    if (!std::isfinite(x)) throw MalformedInput(std::string("non-finite ") + what);
    return x;
}

SkeletonSequence parse_json(std::istream& in) {
    json doc;
    try {
        in >> doc;
    } catch (const json::exception& e) {
        throw MalformedInput(std::string("invalid JSON: ") + e.what());
    }
    SkeletonSequence seq;
    seq.id = doc.value("id", "");
    seq.rate = to_finite(doc.at("rate_hz"), "rate_hz");
    seq.position_only = doc.value("position_only", false);
    const auto& spec = SkeletonSpec::canonical();
    for (const auto& jframe : doc.at("frames")) {
        SkeletonSequence::Frame frame;
        const auto& joints = jframe.at("joints");
        for (const auto& info : spec.joints()) {
            if (!joints.contains(info.name))
                throw MalformedInput("missing joint " + info.name);
            const auto& j = joints.at(info.name);
            Se3Transform tf;
            const auto& t = j.at("t");
            for (int d = 0; d < 3; ++d)
                tf.translation[d] = to_finite(t.at(d), "translation");
            if (j.contains("q")) {
                const auto& q = j.at("q");
                tf.rotation = quat_to_matrix(to_finite(q.at(0), "quaternion"),
                                             to_finite(q.at(1), "quaternion"),
                                             to_finite(q.at(2), "quaternion"),
                                             to_finite(q.at(3), "quaternion"));
            } else if (j.contains("R")) {
                const auto& r = j.at("R");
                for (int a = 0; a < 3; ++a)
                    for (int b = 0; b < 3; ++b)
                        tf.rotation(a, b) = to_finite(r.at(a).at(b), "rotation");
            }
            frame.joints[spec.joint_index(info.name)] = tf;
        }
        seq.frames.push_back(frame);
    }
    validate_sequence(seq);
    return seq;
}

SkeletonSequence parse_csv(std::istream& in) {
    // Header: frame,joint,qw,qx,qy,qz,tx,ty,tz
    std::string line;
    if (!std::getline(in, line)) throw MalformedInput("empty CSV");
    const auto& spec = SkeletonSpec::canonical();
    SkeletonSequence seq;
    seq.rate = 50.0;
    std::vector<std::array<bool, kNumJoints>> seen;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::stringstream row(line);
        std::string cell;
        std::vector<std::string> cells;
        while (std::getline(row, cell, ',')) cells.push_back(cell);
        if (cells.size() != 9) throw MalformedInput("CSV row needs 9 fields");
        long frame_no;
        double vals[7];
        try {
            std::size_t pos = 0;
            frame_no = std::stol(cells[0], &pos);
            if (pos != cells[0].size()) throw MalformedInput("bad frame number");
            for (int i = 0; i < 7; ++i) {
                vals[i] = std::stod(cells[i + 2], &pos);
                if (pos != cells[i + 2].size() || !std::isfinite(vals[i]))
                    throw MalformedInput("non-numeric CSV value");
            }
        } catch (const std::logic_error&) {
            throw MalformedInput("non-numeric CSV value");
        }
        const int joint = spec.joint_index(cells[1]);
        if (joint < 0) throw MalformedInput("unknown joint " + cells[1]);
        if (frame_no < 1) throw MalformedInput("frame numbers start at 1");
        while (seq.frames.size() < static_cast<std::size_t>(frame_no)) {
            seq.frames.emplace_back();
            seen.push_back({});
        }
        auto& tf = seq.frames[frame_no - 1].joints[joint];
        tf.rotation = quat_to_matrix(vals[0], vals[1], vals[2], vals[3]);
        tf.translation = {vals[4], vals[5], vals[6]};
        seen[frame_no - 1][joint] = true;
    }
    for (const auto& s : seen)
        for (int j = 0; j < kNumJoints; ++j)
            if (!s[j]) throw MalformedInput("missing joint " + spec.joints()[j].name);
    validate_sequence(seq);
    return seq;
}

}  // namespace

SkeletonSequence parse_sequence(std::istream& in, SequenceFormat format) {
    return format == SequenceFormat::json ? parse_json(in) : parse_csv(in);
}

SkeletonSequence parse_sequence_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw MalformedInput("cannot open " + path);
    const auto format = path.size() > 4 && path.substr(path.size() - 4) == ".csv"
                            ? SequenceFormat::csv
                            : SequenceFormat::json;
    return parse_sequence(in, format);
}

void serialize_sequence(const SkeletonSequence& seq, std::ostream& out) {
    const auto& spec = SkeletonSpec::canonical();
    json doc;
    doc["id"] = seq.id;
    doc["rate_hz"] = seq.rate;
    doc["position_only"] = seq.position_only;
    doc["frames"] = json::array();
    for (const auto& frame : seq.frames) {
        json jjoints;
        for (int i = 0; i < kNumJoints; ++i) {
            const auto& tf = frame.joints[i];
            Eigen::Quaterniond q(tf.rotation);
            if (q.w() < 0) q.coeffs() *= -1.0;  // canonical sign
            jjoints[spec.joints()[i].name] = {
                {"q", {q.w(), q.x(), q.y(), q.z()}},
                {"t", {tf.translation[0], tf.translation[1], tf.translation[2]}}};
        }
        doc["frames"].push_back({{"joints", jjoints}});
    }
    out << doc.dump(2) << "\n";
}

SkeletonSequence resample(const SkeletonSequence& seq, double target_rate) {
    if (target_rate <= 0) throw OutOfDomain("target rate must be positive");
    if (seq.frames.size() < 2) throw DegenerateSequence("resample needs >= 2 frames");
    const std::size_t n = seq.frames.size();
    std::vector<double> times(n);
    for (std::size_t k = 0; k < n; ++k) times[k] = seq.time_of(k);
    const double t_end = times.back();

    SkeletonSequence out;
    out.rate = target_rate;
    out.id = seq.id;
    out.position_only = seq.position_only;

    // New timestamps: step 1/target_rate from 0, last timestamp preserved.
    std::vector<double> new_times;
    for (long k = 0;; ++k) {
        const double t = k / target_rate;
        if (t >= t_end - 1e-12) break;
        new_times.push_back(t);
    }
    new_times.push_back(t_end);
    out.frames.resize(new_times.size());

    for (int j = 0; j < kNumJoints; ++j) {
        std::vector<Eigen::Vector3d> pts(n);
        for (std::size_t k = 0; k < n; ++k) pts[k] = seq.frames[k].joints[j].translation;
        SplineTrajectory spline(times, pts);
        std::vector<Eigen::Quaterniond> quats(n);
        for (std::size_t k = 0; k < n; ++k) {
            quats[k] = Eigen::Quaterniond(seq.frames[k].joints[j].rotation);
            if (k > 0 && quats[k].dot(quats[k - 1]) < 0) quats[k].coeffs() *= -1.0;
        }
        for (std::size_t k = 0; k < new_times.size(); ++k) {
            const double t = new_times[k];
            auto& tf = out.frames[k].joints[j];
            tf.translation = spline.position(t);
            // Bracketing source frames.
            auto it = std::upper_bound(times.begin(), times.end(), t);
            std::size_t hi = std::min<std::size_t>(it - times.begin(), n - 1);
            std::size_t lo = hi == 0 ? 0 : hi - 1;
            const double span = times[hi] - times[lo];
            const double u = span > 0 ? (t - times[lo]) / span : 0.0;
            tf.rotation = quats[lo].slerp(u, quats[hi]).normalized().toRotationMatrix();
        }
    }
    return out;
}

SkeletonSequence root_sequence_normalize(const SkeletonSequence& seq,
                                         const SkeletonSpec& spec) {
    if (seq.position_only)
        throw PositionOnlyInput("root-sequence normalization needs rotations");
    if (seq.frames.empty()) throw DegenerateSequence("empty sequence");
    const int root = spec.joint_index(spec.root());
    SkeletonSequence out = seq;
    const Se3Transform root1_inv = seq.frames[0].joints[root].inverse();
    for (std::size_t k = 0; k < seq.frames.size(); ++k) {
        for (int j = 0; j < kNumJoints; ++j) {
            const int parent = spec.joint_index(spec.joints()[j].parent);
            const Se3Transform left = root1_inv * seq.frames[0].joints[parent];
            const Se3Transform right =
                seq.frames[k].joints[parent].inverse() * seq.frames[k].joints[j];
            out.frames[k].joints[j] = left * right;
        }
    }
    return out;
}

SkeletonSequence position_normalize(const SkeletonSequence& seq,
                                    const SkeletonSpec& spec) {
    if (seq.frames.empty()) throw DegenerateSequence("empty sequence");
    const int root = spec.joint_index(spec.root());
    const Eigen::Vector3d origin = seq.frames[0].joints[root].translation;
    SkeletonSequence out = seq;
    for (auto& frame : out.frames)
        for (auto& joint : frame.joints) joint.translation -= origin;
    return out;
}

std::array<JointSeries, kJointsPerGroup> group_positions(const SkeletonSequence& seq,
                                                         int group,
                                                         const SkeletonSpec& spec) {
    const auto joints = spec.group_joints(group);
    std::array<JointSeries, kJointsPerGroup> out;
    for (int i = 0; i < kJointsPerGroup; ++i) {
        out[i].times.reserve(seq.frames.size());
        out[i].points.reserve(seq.frames.size());
        for (std::size_t k = 0; k < seq.frames.size(); ++k) {
            out[i].times.push_back(seq.time_of(k));
            out[i].points.push_back(seq.frames[k].joints[joints[i]].translation);
        }
    }
    return out;
}

}  // namespace mprim

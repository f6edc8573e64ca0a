#include "refcalib/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "refcalib/errors.hpp"

namespace refcalib {
namespace {

using Json = nlohmann::ordered_json;

constexpr double kPoseConsistencyTol = 1e-9;

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidArgument("cannot open '" + path + "' for reading");
  return in;
}

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InvalidArgument("cannot open '" + path + "' for writing");
  return out;
}

// ---------------------------------------------------------------- CSV

struct Field {
  std::string_view text;
  std::size_t column;  // 1-based character column
};

class CsvReader {
 public:
  CsvReader(std::istream& in, std::string source) : in_(in), source_(std::move(source)) {}

  // Next non-empty line split on commas; false at end of input.
  bool next(std::vector<Field>& fields) {
    while (std::getline(in_, line_)) {
      ++line_no_;
      if (!line_.empty() && line_.back() == '\r') line_.pop_back();
      if (line_.empty()) continue;
      fields.clear();
      std::size_t start = 0;
      for (;;) {
        const std::size_t comma = line_.find(',', start);
        const std::size_t end = comma == std::string::npos ? line_.size() : comma;
        fields.push_back({std::string_view(line_).substr(start, end - start), start + 1});
        if (comma == std::string::npos) break;
        start = comma + 1;
      }
      return true;
    }
    return false;
  }

  [[noreturn]] void fail(std::size_t column, const std::string& what) const {
    throw ParseError(source_, line_no_, column, what);
  }

  double number(const Field& f, const char* name) const {
    double v = 0.0;
    const char* first = f.text.data();
    const char* last = first + f.text.size();
    const auto res = std::from_chars(first, last, v);
    if (f.text.empty() || res.ec != std::errc() || res.ptr != last || !std::isfinite(v)) {
      fail(f.column, std::string("expected a finite number for '") + name + "', got '" +
                         std::string(f.text) + "'");
    }
    return v;
  }

  long long integer(const Field& f, const char* name) const {
    long long v = 0;
    const char* first = f.text.data();
    const char* last = first + f.text.size();
    const auto res = std::from_chars(first, last, v);
    if (f.text.empty() || res.ec != std::errc() || res.ptr != last) {
      fail(f.column, std::string("expected an integer for '") + name + "', got '" +
                         std::string(f.text) + "'");
    }
    return v;
  }

  bool flag(const Field& f, const char* name) const {
    if (f.text == "1") return true;
    if (f.text == "0") return false;
    fail(f.column, std::string("expected 0 or 1 for '") + name + "', got '" + std::string(f.text) + "'");
  }

  void expect_count(const std::vector<Field>& fields, std::size_t n) const {
    if (fields.size() != n) {
      fail(fields.size() < n ? line_.size() + 1 : fields[n].column,
           "expected " + std::to_string(n) + " fields, got " + std::to_string(fields.size()));
    }
  }

  std::size_t line_no() const { return line_no_; }
  const std::string& source() const { return source_; }

 private:
  std::istream& in_;
  std::string source_;
  std::string line_;
  std::size_t line_no_ = 0;
};

// ---------------------------------------------------------------- JSON

Json parse_json(const std::string& text, const std::string& source) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    // Translate the byte offset into a line and column.
    std::size_t line = 1, column = 1;
    const std::size_t end = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
    for (std::size_t i = 0; i < end; ++i) {
      if (text[i] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
    }
    throw ParseError(source, line, column, "malformed JSON");
  }
}

// Field access with schema errors reported as ParseError at the document level.
class JsonReader {
 public:
  explicit JsonReader(std::string source) : source_(std::move(source)) {}

  [[noreturn]] void fail(const std::string& path, const std::string& what) const {
    throw ParseError(source_, 0, 0, path + ": " + what);
  }

  const Json& field(const Json& obj, const char* key, const std::string& path) const {
    if (!obj.is_object()) fail(path, "expected an object");
    const auto it = obj.find(key);
    if (it == obj.end()) fail(path, std::string("missing field '") + key + "'");
    return *it;
  }

  double number(const Json& v, const std::string& path) const {
    if (!v.is_number()) fail(path, "expected a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) fail(path, "expected a finite number");
    return d;
  }

  std::string string(const Json& v, const std::string& path) const {
    if (!v.is_string()) fail(path, "expected a string");
    return v.get<std::string>();
  }

  std::uint64_t unsigned_int(const Json& v, const std::string& path) const {
    if (!v.is_number_unsigned()) fail(path, "expected a non-negative integer");
    return v.get<std::uint64_t>();
  }

  std::vector<double> numbers(const Json& v, std::size_t n, const std::string& path) const {
    if (!v.is_array() || v.size() != n) {
      fail(path, "expected an array of " + std::to_string(n) + " numbers");
    }
    std::vector<double> out;
    for (std::size_t i = 0; i < n; ++i) out.push_back(number(v[i], path + "[" + std::to_string(i) + "]"));
    return out;
  }

  Vec3 vec3(const Json& v, const std::string& path) const {
    const auto a = numbers(v, 3, path);
    return Vec3(a[0], a[1], a[2]);
  }

  Eigen::Quaterniond quat_wxyz(const Json& v, const std::string& path) const {
    const auto a = numbers(v, 4, path);
    return Eigen::Quaterniond(a[0], a[1], a[2], a[3]);
  }

  const std::string& source() const { return source_; }

 private:
  std::string source_;
};

Json vec_json(const Vec3& v) { return Json::array({v.x(), v.y(), v.z()}); }

Json quat_json(const Eigen::Quaterniond& q) { return Json::array({q.w(), q.x(), q.y(), q.z()}); }

Json pose_json(const Vec3& t, const Eigen::Quaterniond& q) {
  const Mat4 m = Pose::FromQuaternion(q, t).matrix();
  Json mat = Json::array();
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) mat.push_back(m(r, c));
  Json out;
  out["translation"] = vec_json(t);
  out["quaternion_wxyz"] = quat_json(q);
  out["matrix_row_major"] = mat;
  return out;
}

struct PoseFields {
  Vec3 t;
  Eigen::Quaterniond q;
};

PoseFields read_pose_json(const JsonReader& rd, const Json& obj, const std::string& path) {
  PoseFields p;
  p.t = rd.vec3(rd.field(obj, "translation", path), path + ".translation");
  p.q = rd.quat_wxyz(rd.field(obj, "quaternion_wxyz", path), path + ".quaternion_wxyz");
  if (std::abs(p.q.norm() - 1.0) > kPoseConsistencyTol) {
    rd.fail(path + ".quaternion_wxyz", "quaternion is not unit norm within 1e-9");
  }
  if (const auto it = obj.find("matrix_row_major"); it != obj.end()) {
    const auto m = rd.numbers(*it, 16, path + ".matrix_row_major");
    const Mat4 ref = Pose::FromQuaternion(p.q, p.t).matrix();
    for (int r = 0; r < 4; ++r)
      for (int c = 0; c < 4; ++c)
        if (std::abs(m[4 * r + c] - ref(r, c)) > kPoseConsistencyTol) {
          rd.fail(path + ".matrix_row_major", "matrix disagrees with quaternion and translation");
        }
  }
  return p;
}

// Pretty printer that keeps arrays of scalars on one line.
void emit(const Json& j, int indent, std::string& out) {
  const auto pad = [&](int n) { out.append(static_cast<std::size_t>(n), ' '); };
  if (j.is_object()) {
    if (j.empty()) {
      out += "{}";
      return;
    }
    out += "{\n";
    std::size_t i = 0;
    for (const auto& [key, value] : j.items()) {
      pad(indent + 2);
      out += Json(key).dump() + ": ";
      emit(value, indent + 2, out);
      out += ++i < j.size() ? ",\n" : "\n";
    }
    pad(indent);
    out += "}";
  } else if (j.is_array()) {
    const bool flat = std::none_of(j.begin(), j.end(), [](const Json& e) { return e.is_structured(); });
    if (flat || j.empty()) {
      out += "[";
      for (std::size_t i = 0; i < j.size(); ++i) out += (i ? ", " : "") + j[i].dump();
      out += "]";
      return;
    }
    out += "[\n";
    for (std::size_t i = 0; i < j.size(); ++i) {
      pad(indent + 2);
      emit(j[i], indent + 2, out);
      out += i + 1 < j.size() ? ",\n" : "\n";
    }
    pad(indent);
    out += "]";
  } else {
    out += j.dump();
  }
}

std::string dump(const Json& j) {
  std::string out;
  emit(j, 0, out);
  return out + "\n";
}

Conditioning conditioning_from_string(const std::string& s) {
  for (auto c : {Conditioning::kWellConditioned, Conditioning::kNearCollinear,
                 Conditioning::kNearPlanar, Conditioning::kDegenerate}) {
    if (s == to_string(c)) return c;
  }
  throw InvalidArgument("unknown condition classification '" + s + "'");
}

}  // namespace

std::string read_text_file(const std::string& path) {
  std::ifstream in = open_input(path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out = open_output(path);
  out << text;
  if (!out) throw InvalidArgument("failed writing '" + path + "'");
}

// ---------------------------------------------------------------- track

Track2D read_track_csv(std::istream& in, const std::string& source) {
  CsvReader csv(in, source);
  std::vector<Field> f;
  if (!csv.next(f)) throw ParseError(source, 1, 1, "missing header 'frame,u,v,visible,sync'");
  const char* names[] = {"frame", "u", "v", "visible", "sync"};
  csv.expect_count(f, 5);
  for (std::size_t i = 0; i < 5; ++i) {
    if (f[i].text != names[i]) {
      csv.fail(f[i].column, std::string("expected header column '") + names[i] + "'");
    }
  }
  Track2D track;
  while (csv.next(f)) {
    csv.expect_count(f, 5);
    TrackFrame tf;
    tf.frame_index = csv.integer(f[0], "frame");
    tf.visible = csv.flag(f[3], "visible");
    tf.sync = csv.flag(f[4], "sync");
    if (!tf.visible && f[1].text.empty() && f[2].text.empty()) {
      tf.u = tf.v = std::numeric_limits<double>::quiet_NaN();
    } else {
      tf.u = csv.number(f[1], "u");
      tf.v = csv.number(f[2], "v");
    }
    if (!track.frames.empty() && tf.frame_index <= track.frames.back().frame_index) {
      throw NonMonotoneFrames(source, csv.line_no());
    }
    track.frames.push_back(tf);
  }
  return track;
}

Track2D parse_track_csv(const std::string& path) {
  std::ifstream in = open_input(path);
  return read_track_csv(in, path);
}

void write_track_csv(const Track2D& track, std::ostream& out) {
  out << "frame,u,v,visible,sync\n";
  for (const auto& f : track.frames) {
    out << f.frame_index << ',';
    if (!f.visible && std::isnan(f.u) && std::isnan(f.v)) {
      out << ',';
    } else {
      out << format_double(f.u) << ',' << format_double(f.v);
    }
    out << ',' << (f.visible ? 1 : 0) << ',' << (f.sync ? 1 : 0) << '\n';
  }
}

void write_track_csv(const Track2D& track, const std::string& path) {
  std::ofstream out = open_output(path);
  write_track_csv(track, out);
}

// ---------------------------------------------------------------- joint log

JointLog read_joint_log_csv(std::istream& in, const std::string& source) {
  CsvReader csv(in, source);
  std::vector<Field> f;
  if (!csv.next(f)) throw ParseError(source, 1, 1, "missing header 'frame,t,j1,...,jJ'");
  if (f.size() < 3 || f[0].text != "frame" || f[1].text != "t") {
    csv.fail(1, "expected header 'frame,t,j1,...,jJ'");
  }
  const std::size_t dof = f.size() - 2;
  for (std::size_t j = 0; j < dof; ++j) {
    if (f[j + 2].text != "j" + std::to_string(j + 1)) {
      csv.fail(f[j + 2].column, "expected header column 'j" + std::to_string(j + 1) + "'");
    }
  }
  JointLog log;
  while (csv.next(f)) {
    csv.expect_count(f, dof + 2);
    JointFrame jf;
    jf.frame_index = csv.integer(f[0], "frame");
    jf.timestamp = csv.number(f[1], "t");
    jf.positions.resize(static_cast<Eigen::Index>(dof));
    for (std::size_t j = 0; j < dof; ++j) {
      jf.positions[static_cast<Eigen::Index>(j)] = csv.number(f[j + 2], "joint position");
    }
    if (!log.frames.empty() && jf.frame_index <= log.frames.back().frame_index) {
      throw NonMonotoneFrames(source, csv.line_no());
    }
    log.frames.push_back(std::move(jf));
  }
  return log;
}

JointLog parse_joint_log_csv(const std::string& path) {
  std::ifstream in = open_input(path);
  return read_joint_log_csv(in, path);
}

void write_joint_log_csv(const JointLog& log, std::ostream& out) {
  const Eigen::Index dof = log.frames.empty() ? 0 : log.frames.front().positions.size();
  if (dof == 0) throw EmptyInput("cannot write a joint log without joints");
  out << "frame,t";
  for (Eigen::Index j = 0; j < dof; ++j) out << ",j" << (j + 1);
  out << '\n';
  for (const auto& f : log.frames) {
    if (f.positions.size() != dof) throw DimensionMismatch(dof, f.positions.size());
    out << f.frame_index << ',' << format_double(f.timestamp);
    for (Eigen::Index j = 0; j < dof; ++j) out << ',' << format_double(f.positions[j]);
    out << '\n';
  }
}

void write_joint_log_csv(const JointLog& log, const std::string& path) {
  std::ofstream out = open_output(path);
  write_joint_log_csv(log, out);
}

void check_joint_schema(const KinematicChain& chain, const JointLog& log) {
  for (const auto& f : log.frames) {
    if (static_cast<std::size_t>(f.positions.size()) != chain.dof()) {
      throw SchemaMismatch("joint log has " + std::to_string(f.positions.size()) +
                           " joints per row but chain '" + chain.name() + "' has " +
                           std::to_string(chain.dof()));
    }
  }
}

// ---------------------------------------------------------------- chain

ChainFile read_chain_json(const std::string& text, const std::string& source) {
  const Json doc = parse_json(text, source);
  const JsonReader rd(source);
  const std::string name = rd.string(rd.field(doc, "name", "$"), "$.name");
  const Json& js = rd.field(doc, "joints", "$");
  if (!js.is_array()) rd.fail("$.joints", "expected an array");

  std::vector<Joint> joints;
  for (std::size_t i = 0; i < js.size(); ++i) {
    const std::string p = "$.joints[" + std::to_string(i) + "]";
    const Json& jj = js[i];
    Joint j;
    j.name = rd.string(rd.field(jj, "name", p), p + ".name");
    try {
      j.kind = joint_kind_from_string(rd.string(rd.field(jj, "kind", p), p + ".kind"));
    } catch (const InvalidArgument& e) {
      rd.fail(p + ".kind", e.what());
    }
    j.axis = rd.vec3(rd.field(jj, "axis", p), p + ".axis");
    const Json& origin = rd.field(jj, "origin", p);
    j.origin_translation = rd.vec3(rd.field(origin, "t", p + ".origin"), p + ".origin.t");
    j.origin_rotation = rd.quat_wxyz(rd.field(origin, "q", p + ".origin"), p + ".origin.q");
    if (const auto it = jj.find("limits"); it != jj.end()) {
      const auto l = rd.numbers(*it, 2, p + ".limits");
      j.limits = std::pair{l[0], l[1]};
    }
    if (const auto it = jj.find("parent"); it != jj.end()) j.parent = rd.string(*it, p + ".parent");
    if (const auto it = jj.find("child"); it != jj.end()) j.child = rd.string(*it, p + ".child");
    joints.push_back(std::move(j));
  }

  ChainFile out;
  try {
    out.chain = KinematicChain(name, std::move(joints));
  } catch (const InvalidArgument& e) {
    rd.fail("$.joints", e.what());
  }
  const Json& rp = rd.field(doc, "reference_point", "$");
  out.ref.link_index = rd.unsigned_int(rd.field(rp, "link", "$.reference_point"), "$.reference_point.link");
  out.ref.offset = rd.vec3(rd.field(rp, "offset", "$.reference_point"), "$.reference_point.offset");
  try {
    out.chain.validate(out.ref);
  } catch (const InvalidArgument& e) {
    rd.fail("$.reference_point", e.what());
  }
  return out;
}

ChainFile parse_chain_file(const std::string& path) {
  return read_chain_json(read_text_file(path), path);
}

std::string serialize_chain(const KinematicChain& chain, const ReferencePoint& ref) {
  Json doc;
  doc["name"] = chain.name();
  Json js = Json::array();
  for (const Joint& j : chain.joints()) {
    Json jj;
    jj["name"] = j.name;
    jj["kind"] = to_string(j.kind);
    jj["axis"] = vec_json(j.axis);
    jj["origin"] = Json{{"t", vec_json(j.origin_translation)}, {"q", quat_json(j.origin_rotation)}};
    if (j.limits) jj["limits"] = Json::array({j.limits->first, j.limits->second});
    if (!j.parent.empty()) jj["parent"] = j.parent;
    if (!j.child.empty()) jj["child"] = j.child;
    js.push_back(std::move(jj));
  }
  doc["joints"] = std::move(js);
  doc["reference_point"] = Json{{"link", ref.link_index}, {"offset", vec_json(ref.offset)}};
  return dump(doc);
}

void write_chain_file(const KinematicChain& chain, const ReferencePoint& ref, const std::string& path) {
  write_text_file(path, serialize_chain(chain, ref));
}

// ---------------------------------------------------------------- intrinsics

CameraIntrinsics read_intrinsics_json(const std::string& text, const std::string& source) {
  const Json doc = parse_json(text, source);
  const JsonReader rd(source);
  const auto dim = [&](const char* key) {
    const std::uint64_t v = rd.unsigned_int(rd.field(doc, key, "$"), std::string("$.") + key);
    if (v == 0 || v > static_cast<std::uint64_t>(std::numeric_limits<int>::max())) {
      rd.fail(std::string("$.") + key, "must be a positive image dimension");
    }
    return static_cast<int>(v);
  };
  const int width = dim("width");
  const int height = dim("height");
  CameraIntrinsics k;
  try {
    if (doc.contains("fov_deg_horizontal") && !doc.contains("fx")) {
      const double fov = rd.number(doc["fov_deg_horizontal"], "$.fov_deg_horizontal");
      if (!(fov > 0.0 && fov < 180.0)) rd.fail("$.fov_deg_horizontal", "must lie in (0, 180)");
      k = CameraIntrinsics::FromHorizontalFov(fov * M_PI / 180.0, width, height);
    } else {
      k.fx = rd.number(rd.field(doc, "fx", "$"), "$.fx");
      k.fy = rd.number(rd.field(doc, "fy", "$"), "$.fy");
      k.cx = rd.number(rd.field(doc, "cx", "$"), "$.cx");
      k.cy = rd.number(rd.field(doc, "cy", "$"), "$.cy");
      k.width = width;
      k.height = height;
    }
    k.validate();
  } catch (const InvalidArgument& e) {
    rd.fail("$", e.what());
  }
  return k;
}

CameraIntrinsics parse_intrinsics_file(const std::string& path) {
  return read_intrinsics_json(read_text_file(path), path);
}

std::string serialize_intrinsics(const CameraIntrinsics& k) {
  Json doc;
  doc["fx"] = k.fx;
  doc["fy"] = k.fy;
  doc["cx"] = k.cx;
  doc["cy"] = k.cy;
  doc["width"] = k.width;
  doc["height"] = k.height;
  return dump(doc);
}

void write_intrinsics_file(const CameraIntrinsics& k, const std::string& path) {
  write_text_file(path, serialize_intrinsics(k));
}

// ---------------------------------------------------------------- results

Pose ResultDocument::pose() const { return Pose::FromQuaternion(quaternion, translation); }

ResultDocument ResultDocument::FromResult(const CalibrationResult& result) {
  ResultDocument doc;
  doc.mode = result.mode;
  doc.translation = result.pose.translation();
  doc.quaternion = result.pose.quaternion();
  doc.rms_reprojection_px = result.solution.rms_reprojection_error;
  doc.n_pairs_used = result.n_pairs_used;
  doc.dropped = result.dropped;
  doc.condition = result.solution.condition_report.classification;
  return doc;
}

std::string serialize_result(const ResultDocument& doc) {
  Json j;
  j["tool"] = "refcalib";
  j["tool_version"] = doc.tool_version;
  j["mode"] = to_string(doc.mode);
  j["frame"] = doc.mode == CalibrationMode::kEyeOnBase ? "T^CB" : "T^CE";
  j["pose"] = pose_json(doc.translation, doc.quaternion);
  j["rms_reprojection_px"] = doc.rms_reprojection_px;
  j["n_pairs_used"] = doc.n_pairs_used;
  j["condition"] = to_string(doc.condition);
  j["rotation_metric"] = doc.rotation_metric;
  Json dropped = Json::array();
  for (const auto& d : doc.dropped) dropped.push_back(Json{{"frame", d.frame_index}, {"reason", to_string(d.reason)}});
  j["dropped"] = std::move(dropped);
  Json digests = Json::object();
  for (const auto& [role, hex] : doc.input_digests) digests[role] = hex;
  j["input_digests"] = std::move(digests);
  return dump(j);
}

ResultDocument read_result_json(const std::string& text, const std::string& source) {
  const Json j = parse_json(text, source);
  const JsonReader rd(source);
  ResultDocument doc;
  try {
    doc.mode = calibration_mode_from_string(rd.string(rd.field(j, "mode", "$"), "$.mode"));
    doc.condition = conditioning_from_string(rd.string(rd.field(j, "condition", "$"), "$.condition"));
  } catch (const InvalidArgument& e) {
    rd.fail("$", e.what());
  }
  const PoseFields p = read_pose_json(rd, rd.field(j, "pose", "$"), "$.pose");
  doc.translation = p.t;
  doc.quaternion = p.q;
  doc.tool_version = rd.string(rd.field(j, "tool_version", "$"), "$.tool_version");
  doc.rms_reprojection_px = rd.number(rd.field(j, "rms_reprojection_px", "$"), "$.rms_reprojection_px");
  doc.n_pairs_used = rd.unsigned_int(rd.field(j, "n_pairs_used", "$"), "$.n_pairs_used");
  doc.rotation_metric = rd.string(rd.field(j, "rotation_metric", "$"), "$.rotation_metric");
  const Json& dropped = rd.field(j, "dropped", "$");
  if (!dropped.is_array()) rd.fail("$.dropped", "expected an array");
  for (std::size_t i = 0; i < dropped.size(); ++i) {
    const std::string path = "$.dropped[" + std::to_string(i) + "]";
    const Json& frame = rd.field(dropped[i], "frame", path);
    if (!frame.is_number_integer()) rd.fail(path + ".frame", "expected an integer");
    DroppedFrame d;
    d.frame_index = frame.get<long long>();
    try {
      d.reason = drop_reason_from_string(rd.string(rd.field(dropped[i], "reason", path), path + ".reason"));
    } catch (const InvalidArgument& e) {
      rd.fail(path + ".reason", e.what());
    }
    doc.dropped.push_back(d);
  }
  const Json& digests = rd.field(j, "input_digests", "$");
  if (!digests.is_object()) rd.fail("$.input_digests", "expected an object");
  for (const auto& [role, hex] : digests.items()) {
    doc.input_digests[role] = rd.string(hex, "$.input_digests." + role);
  }
  return doc;
}

void write_result(const ResultDocument& doc, const std::string& path) {
  write_text_file(path, serialize_result(doc));
}

ResultDocument read_result(const std::string& path) {
  return read_result_json(read_text_file(path), path);
}

Pose PoseDocument::pose() const { return Pose::FromQuaternion(quaternion, translation); }

PoseDocument PoseDocument::FromPose(CalibrationMode mode, const Pose& pose) {
  return {mode, pose.translation(), pose.quaternion()};
}

std::string serialize_pose_document(const PoseDocument& doc) {
  Json j;
  j["mode"] = to_string(doc.mode);
  j["frame"] = doc.mode == CalibrationMode::kEyeOnBase ? "T^CB" : "T^CE";
  j["pose"] = pose_json(doc.translation, doc.quaternion);
  return dump(j);
}

std::string serialize_pose_document(CalibrationMode mode, const Pose& pose) {
  return serialize_pose_document(PoseDocument::FromPose(mode, pose));
}

PoseDocument read_pose_document(const std::string& text, const std::string& source) {
  const Json j = parse_json(text, source);
  const JsonReader rd(source);
  PoseDocument doc;
  try {
    doc.mode = calibration_mode_from_string(rd.string(rd.field(j, "mode", "$"), "$.mode"));
  } catch (const InvalidArgument& e) {
    rd.fail("$.mode", e.what());
  }
  const PoseFields p = read_pose_json(rd, rd.field(j, "pose", "$"), "$.pose");
  doc.translation = p.t;
  doc.quaternion = p.q;
  return doc;
}

Pose read_pose_file(const std::string& path) {
  return read_pose_document(read_text_file(path), path).pose();
}

}  // namespace refcalib

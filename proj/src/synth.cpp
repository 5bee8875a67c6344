// mmcal - multi-modal extrinsic calibration toolkit
// SPDX-License-Identifier: Apache-2.0

#include "mmcal/synth.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <random>

namespace mmcal {

uint64_t mix_seed(uint64_t seed, uint64_t stream) {
  // splitmix64 over the pair
  uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

namespace {

constexpr double kRayEps = 1e-9;
constexpr double kVisTol = 1e-6;

struct Hit {
  double t = 0.0;
  int box = -1;
};

// Slab test; origins are assumed outside every box.
bool ray_box(const Vec3& o, const Vec3& d, const Box& box, double* t_hit) {
  double tmin = kRayEps, tmax = std::numeric_limits<double>::infinity();
  for (int a = 0; a < 3; ++a) {
    if (std::abs(d[a]) < 1e-15) {
      if (o[a] < box.lo[a] || o[a] > box.hi[a]) return false;
      continue;
    }
    double t1 = (box.lo[a] - o[a]) / d[a];
    double t2 = (box.hi[a] - o[a]) / d[a];
    if (t1 > t2) std::swap(t1, t2);
    tmin = std::max(tmin, t1);
    tmax = std::min(tmax, t2);
    if (tmin > tmax) return false;
  }
  *t_hit = tmin;
  return true;
}

std::optional<Hit> raycast(const std::vector<Box>& boxes, const Vec3& o,
                           const Vec3& d, double max_t) {
  Hit best;
  best.t = max_t;
  for (size_t i = 0; i < boxes.size(); ++i) {
    double t;
    if (ray_box(o, d, boxes[i], &t) && t < best.t) {
      best.t = t;
      best.box = static_cast<int>(i);
    }
  }
  if (best.box < 0) return std::nullopt;
  return best;
}

bool point_visible(const std::vector<Box>& boxes, const Vec3& cam,
                   const Vec3& p) {
  const Vec3 diff = p - cam;
  const double dist = diff.norm();
  if (dist < 1e-6) return false;
  const auto hit = raycast(boxes, cam, diff / dist, dist + 1.0);
  return hit && std::abs(hit->t - dist) < kVisTol * std::max(1.0, dist);
}

// ---------------------------------------------------------------------------
// Box silhouettes

struct Segment {
  Vec3 a, b;
  int box = -1;
  int edge = -1;  // 0..11 within the box
};

// The 12 edges of a box: free axis f, fixed sides (s1, s2) on the other
// two axes in ascending order.
void box_edge(const Box& box, int edge_id, int* free_axis, Vec3* a, Vec3* b) {
  const int f = edge_id / 4;
  const int s1 = (edge_id % 4) / 2;
  const int s2 = edge_id % 2;
  int a1 = (f == 0) ? 1 : 0;
  int a2 = (f == 2) ? 1 : 2;
  Vec3 lo = box.lo, hi = box.hi;
  Vec3 p0, p1;
  p0[f] = lo[f];
  p1[f] = hi[f];
  p0[a1] = p1[a1] = s1 ? hi[a1] : lo[a1];
  p0[a2] = p1[a2] = s2 ? hi[a2] : lo[a2];
  *free_axis = f;
  *a = p0;
  *b = p1;
}

bool face_front(const Box& box, int axis, int side, const Vec3& cam) {
  return side ? cam[axis] > box.hi[axis] : cam[axis] < box.lo[axis];
}

// An edge lies on the apparent contour iff exactly one adjacent face is
// front-facing.
bool edge_on_silhouette(const Box& box, int edge_id, const Vec3& cam) {
  const int f = edge_id / 4;
  const int s1 = (edge_id % 4) / 2;
  const int s2 = edge_id % 2;
  const int a1 = (f == 0) ? 1 : 0;
  const int a2 = (f == 2) ? 1 : 2;
  return face_front(box, a1, s1, cam) != face_front(box, a2, s2, cam);
}

std::vector<Segment> silhouette_segments(const std::vector<Box>& boxes,
                                         const Vec3& cam) {
  std::vector<Segment> out;
  for (size_t bi = 0; bi < boxes.size(); ++bi) {
    for (int e = 0; e < 12; ++e) {
      if (!edge_on_silhouette(boxes[bi], e, cam)) continue;
      Segment seg;
      int f;
      box_edge(boxes[bi], e, &f, &seg.a, &seg.b);
      seg.box = static_cast<int>(bi);
      seg.edge = e;
      out.push_back(seg);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Sensors

Vec3 laser_ray_dir(const LaserModel& model, int ring, int col) {
  // Camera-like laser frame: x right, y down, z forward. Ring 0 is the top
  // of the vertical fan; azimuth sweeps left to right.
  const double elev =
      deg_to_rad(model.vfov_deg) *
          (0.5 - (model.rings > 1 ? double(ring) / (model.rings - 1) : 0.5));
  const double azim =
      deg_to_rad(model.hfov_deg) * ((col + 0.5) / model.cols - 0.5);
  const double ce = std::cos(elev);
  return Vec3(std::sin(azim) * ce, -std::sin(elev), std::cos(azim) * ce);
}

ImageU8 render_view(const std::vector<Box>& boxes, const PinholeIntrinsics& k,
                    const Pose& world_from_cam, uint8_t background,
                    size_t* hit_pixels = nullptr) {
  ImageU8 img(k.width, k.height, background);
  const Vec3 origin = world_from_cam.translation;
  size_t hits = 0;
  for (int y = 0; y < k.height; ++y) {
    for (int x = 0; x < k.width; ++x) {
      const Vec3 dir_cam((x - k.cx) / k.fx, (y - k.cy) / k.fy, 1.0);
      const Vec3 dir = (world_from_cam.rotation * dir_cam).normalized();
      const auto hit = raycast(boxes, origin, dir, 1e9);
      if (hit) {
        img.at(x, y) = boxes[hit->box].gray;
        ++hits;
      }
    }
  }
  if (hit_pixels) *hit_pixels = hits;
  return img;
}

// Rasterizes the apparent contour of every box into a binary map,
// sampling each visible silhouette segment at sub-pixel steps.
EdgeMap rasterize_silhouettes(const std::vector<Box>& boxes,
                              const PinholeIntrinsics& k,
                              const Pose& world_from_cam) {
  EdgeMap map(k.width, k.height, 0);
  const Pose cam_from_world = inverse(world_from_cam);
  const Vec3 cam = world_from_cam.translation;
  for (const Segment& seg : silhouette_segments(boxes, cam)) {
    // Estimate the projected length from a few probes to pick the step.
    double max_px = 0.0;
    Vec2 prev;
    bool have_prev = false;
    for (int i = 0; i <= 4; ++i) {
      const Vec3 p = seg.a + (seg.b - seg.a) * (i / 4.0);
      Vec2 uv;
      if (!try_project(k, cam_from_world.apply(p), &uv)) {
        have_prev = false;
        continue;
      }
      if (have_prev) max_px = std::max(max_px, (uv - prev).norm());
      prev = uv;
      have_prev = true;
    }
    const int samples =
        std::clamp(static_cast<int>(std::ceil(4.0 * max_px / 0.4)), 8, 200000);
    for (int i = 0; i <= samples; ++i) {
      const Vec3 p = seg.a + (seg.b - seg.a) * (double(i) / samples);
      Vec2 uv;
      if (!try_project(k, cam_from_world.apply(p), &uv)) continue;
      const int px = static_cast<int>(std::lround(uv.x()));
      const int py = static_cast<int>(std::lround(uv.y()));
      if (!map.in_bounds(px, py)) continue;
      if (!point_visible(boxes, cam, p)) continue;
      map.at(px, py) = 255;
    }
  }
  return map;
}

struct FeatureSample {
  Vec3 world;
  bool edge = false;
};

// Surface samples visible from both stereo cameras: interior face points
// (never near an image edge under flat shading) and points on silhouette
// creases shared by the left, right, and thermal views.
std::vector<FeatureSample> sample_features(const SceneSpec& spec,
                                           const Pose& world_from_stereo,
                                           std::mt19937_64& rng) {
  const Pose world_from_right = compose(world_from_stereo, spec.rig.t_lr);
  const Pose world_from_thermal = compose(world_from_stereo, spec.rig.t_st);
  const Vec3 cam_l = world_from_stereo.translation;
  const Vec3 cam_r = world_from_right.translation;
  const Vec3 cam_t = world_from_thermal.translation;
  const Pose left_from_world = inverse(world_from_stereo);
  const Pose right_from_world = inverse(world_from_right);

  // Silhouette creases agreed on by all three cameras.
  std::vector<Segment> segs;
  for (const Segment& seg : silhouette_segments(spec.boxes, cam_l)) {
    if (edge_on_silhouette(spec.boxes[seg.box], seg.edge, cam_r) &&
        edge_on_silhouette(spec.boxes[seg.box], seg.edge, cam_t)) {
      segs.push_back(seg);
    }
  }

  auto in_view = [&](const Vec3& world, const Pose& cam_from_world,
                     const PinholeIntrinsics& k) {
    Vec2 uv;
    if (!try_project(k, cam_from_world.apply(world), &uv)) return false;
    return uv.x() >= 2.0 && uv.x() <= k.width - 3.0 && uv.y() >= 2.0 &&
           uv.y() <= k.height - 3.0;
  };

  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<size_t> pick_box(0, spec.boxes.size() - 1);

  std::vector<FeatureSample> samples;
  const int want_edge = spec.features_per_frame * 35 / 100;
  const int want_interior = spec.features_per_frame - want_edge;

  int attempts = 0;
  const int max_attempts = spec.features_per_frame * 300;
  while (static_cast<int>(samples.size()) < want_interior &&
         attempts++ < max_attempts) {
    const Box& box = spec.boxes[pick_box(rng)];
    const int axis = std::uniform_int_distribution<int>(0, 2)(rng);
    const int side = std::uniform_int_distribution<int>(0, 1)(rng);
    if (!face_front(box, axis, side, cam_l)) continue;
    const int u_axis = (axis == 0) ? 1 : 0;
    const int v_axis = (axis == 2) ? 1 : 2;
    Vec3 p;
    p[axis] = side ? box.hi[axis] : box.lo[axis];
    const double margin = 0.1;
    p[u_axis] = box.lo[u_axis] +
                (box.hi[u_axis] - box.lo[u_axis]) *
                    (margin + (1 - 2 * margin) * unit(rng));
    p[v_axis] = box.lo[v_axis] +
                (box.hi[v_axis] - box.lo[v_axis]) *
                    (margin + (1 - 2 * margin) * unit(rng));
    if (!in_view(p, left_from_world, spec.rig.k_left)) continue;
    if (!in_view(p, right_from_world, spec.rig.k_right)) continue;
    if (!point_visible(spec.boxes, cam_l, p)) continue;
    if (!point_visible(spec.boxes, cam_r, p)) continue;
    samples.push_back({p, false});
  }

  attempts = 0;
  int edge_found = 0;
  while (edge_found < want_edge && !segs.empty() &&
         attempts++ < max_attempts) {
    const Segment& seg =
        segs[std::uniform_int_distribution<size_t>(0, segs.size() - 1)(rng)];
    const Vec3 p = seg.a + (seg.b - seg.a) * unit(rng);
    if (!in_view(p, left_from_world, spec.rig.k_left)) continue;
    if (!in_view(p, right_from_world, spec.rig.k_right)) continue;
    if (!point_visible(spec.boxes, cam_l, p)) continue;
    if (!point_visible(spec.boxes, cam_r, p)) continue;
    if (!point_visible(spec.boxes, cam_t, p)) continue;
    samples.push_back({p, true});
    ++edge_found;
  }
  return samples;
}

}  // namespace

std::vector<std::pair<int, int>> predict_laser_edges(
    const OrganizedScan& scan, const std::vector<int>& cell_object_ids,
    const LaserEdgeParams& params) {
  std::vector<std::pair<int, int>> out;
  const int cols = scan.cols();
  auto id_at = [&](int ring, int col) {
    return cell_object_ids[static_cast<size_t>(ring) * cols + col];
  };
  auto col_wrap = [&](int c) { return ((c % cols) + cols) % cols; };

  for (int ring = 0; ring < scan.rings(); ++ring) {
    for (int col = 0; col < cols; ++col) {
      if (!scan.valid(ring, col)) continue;

      // A candidate sits at an object-id transition toward one side.
      for (int dir : {-1, +1}) {
        int nc = col + dir;
        if (params.wrap) {
          nc = col_wrap(nc);
        } else if (nc < 0 || nc >= cols) {
          continue;
        }
        if (!scan.valid(ring, nc)) continue;
        if (id_at(ring, nc) == id_at(ring, col)) continue;

        const double range = scan.at(ring, col).norm();
        // Own side = away from the transition; far side = across it.
        bool ok = true;
        for (int i = 1; i <= params.k && ok; ++i) {
          int own = col - dir * i;
          if (params.wrap) {
            own = col_wrap(own);
          } else if (own < 0 || own >= cols) {
            ok = false;
            break;
          }
          if (!scan.valid(ring, own) ||
              id_at(ring, own) != id_at(ring, col) ||
              std::abs(scan.at(ring, own).norm() - range) > params.epsilon) {
            ok = false;
          }
        }
        for (int i = 1; i <= params.k && ok; ++i) {
          int far = col + dir * i;
          if (params.wrap) {
            far = col_wrap(far);
          } else if (far < 0 || far >= cols) {
            ok = false;
            break;
          }
          if (!scan.valid(ring, far) ||
              !(scan.at(ring, far).norm() - range > params.epsilon)) {
            ok = false;
          }
        }
        if (ok) {
          out.emplace_back(ring, col);
          break;  // flag once even if both sides qualify
        }
      }
    }
  }
  return out;
}

Pose perturb_pose(const Pose& t, double rot_min_deg, double rot_max_deg,
                  double trans_min, double trans_max, uint64_t seed) {
  if (rot_min_deg < 0 || rot_max_deg < rot_min_deg || trans_min < 0 ||
      trans_max < trans_min) {
    throw CalibError(ErrorCode::InvalidArgument,
                     "perturb_pose: need 0 <= min <= max");
  }
  std::mt19937_64 rng(mix_seed(seed, 0xa11ce));
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> rot_mag(rot_min_deg, rot_max_deg);
  std::uniform_real_distribution<double> trans_mag(trans_min, trans_max);

  auto random_dir = [&]() {
    Vec3 v;
    do {
      v = Vec3(gauss(rng), gauss(rng), gauss(rng));
    } while (v.norm() < 1e-9);
    return Vec3(v.normalized());
  };

  Pose out = t;
  const double angle = deg_to_rad(rot_mag(rng));
  if (angle > 0) {
    const Mat3 delta(Eigen::AngleAxisd(angle, random_dir()));
    out.rotation = delta * t.rotation;
  }
  const double mag = trans_mag(rng);
  if (mag > 0) out.translation = t.translation + mag * random_dir();
  return out;
}

namespace {

std::vector<Pose> default_frame_poses(const SceneSpec& spec, int n_frames) {
  std::vector<Pose> poses;
  std::mt19937_64 rng(mix_seed(spec.seed, 0xf0a));
  std::uniform_real_distribution<double> jit(-1.0, 1.0);
  for (int i = 0; i < n_frames; ++i) {
    const double c = i - (n_frames - 1) * 0.5;
    const double yaw = deg_to_rad(3.0 * c + 0.8 * jit(rng));
    const double pitch = deg_to_rad(0.5 * jit(rng));
    Pose pose;
    pose.rotation = Mat3(Eigen::AngleAxisd(yaw, Vec3::UnitY()) *
                         Eigen::AngleAxisd(pitch, Vec3::UnitX()));
    pose.translation = Vec3(0.35 * c + 0.05 * jit(rng), 0.12 * jit(rng),
                            0.08 * jit(rng));
    poses.push_back(pose);
  }
  return poses;
}

std::string frame_name(int i) {
  char buf[8];
  std::snprintf(buf, sizeof(buf), "%04d", i);
  return buf;
}

}  // namespace

SynthOutput generate(const SceneSpec& spec, int n_frames) {
  if (spec.boxes.empty()) {
    throw CalibError(ErrorCode::InvalidArgument, "generate: no scene geometry");
  }
  if (n_frames < 1) {
    throw CalibError(ErrorCode::InvalidArgument, "generate: need >= 1 frame");
  }
  spec.rig.k_left.validate();
  spec.rig.k_right.validate();
  spec.rig.k_thermal.validate();

  SynthOutput out;
  out.truth.t_sl = spec.rig.t_sl;
  out.truth.t_st = spec.rig.t_st;
  out.dataset.manifest.k_left = spec.rig.k_left;
  out.dataset.manifest.k_right = spec.rig.k_right;
  out.dataset.manifest.k_thermal = spec.rig.k_thermal;
  out.dataset.manifest.t_lr = spec.rig.t_lr;
  out.dataset.manifest.thermal_kind =
      spec.thermal_kind == ThermalKind::EdgeMap ? "edge_map" : "intensity";

  const std::vector<Pose> poses = spec.frame_poses.empty()
                                      ? default_frame_poses(spec, n_frames)
                                      : spec.frame_poses;
  if (static_cast<int>(poses.size()) < n_frames) {
    throw CalibError(ErrorCode::InvalidArgument,
                     "generate: fewer frame poses than frames");
  }

  const LaserModel& lm = spec.rig.laser;
  for (int fi = 0; fi < n_frames; ++fi) {
    std::mt19937_64 rng(mix_seed(spec.seed, fi));
    std::normal_distribution<double> gauss(0.0, 1.0);

    const Pose& world_from_stereo = poses[fi];
    const Pose world_from_laser = compose(world_from_stereo, spec.rig.t_sl);
    const Pose world_from_thermal = compose(world_from_stereo, spec.rig.t_st);
    const Pose world_from_right = compose(world_from_stereo, spec.rig.t_lr);

    FrameData frame;
    frame.id = frame_name(fi);
    SynthFrameExtras extras;
    extras.world_from_stereo = world_from_stereo;

    // Laser scan by ray casting the ring/azimuth grid.
    frame.scan = OrganizedScan(lm.rings, lm.cols);
    std::vector<int> object_ids(static_cast<size_t>(lm.rings) * lm.cols, -1);
    OrganizedScan clean_scan(lm.rings, lm.cols);
    size_t laser_hits = 0;
    for (int r = 0; r < lm.rings; ++r) {
      for (int c = 0; c < lm.cols; ++c) {
        const Vec3 d_laser = laser_ray_dir(lm, r, c);
        const Vec3 d_world = world_from_laser.rotation * d_laser;
        const auto hit = raycast(spec.boxes, world_from_laser.translation,
                                 d_world, lm.max_range);
        if (!hit) continue;
        ++laser_hits;
        object_ids[static_cast<size_t>(r) * lm.cols + c] = hit->box;
        clean_scan.set(r, c, d_laser * hit->t);
        double range = hit->t;
        if (spec.noise.laser_sigma > 0) {
          range = std::max(0.05, range + spec.noise.laser_sigma * gauss(rng));
        }
        frame.scan.set(r, c, d_laser * range);
      }
    }
    if (laser_hits == 0) {
      throw CalibError(ErrorCode::EmptyView,
                       "generate: laser sees nothing in frame " + frame.id);
    }
    extras.predicted_laser_edge_cells =
        predict_laser_edges(clean_scan, object_ids, LaserEdgeParams{});

    // Stereo correspondences from sampled surface points.
    const auto features = sample_features(spec, world_from_stereo, rng);
    if (features.empty()) {
      throw CalibError(ErrorCode::EmptyView,
                       "generate: no stereo features in frame " + frame.id);
    }
    const Pose left_from_world = inverse(world_from_stereo);
    const Pose right_from_world = inverse(world_from_right);
    for (const auto& f : features) {
      Vec3 p = f.world;
      if (spec.noise.stereo_sigma > 0) {
        p += spec.noise.stereo_sigma *
             Vec3(gauss(rng), gauss(rng), gauss(rng));
      }
      Vec2 ul, ur;
      if (!try_project(spec.rig.k_left, left_from_world.apply(p), &ul)) continue;
      if (!try_project(spec.rig.k_right, right_from_world.apply(p), &ur)) continue;
      frame.matches.push_back({ul, ur});
      extras.match_edge_labels.push_back(f.edge ? 1 : 0);
      extras.match_points_stereo.push_back(left_from_world.apply(p));
    }
    frame.has_matches = true;

    // Rendered stereo views (flat shading).
    frame.left = render_view(spec.boxes, spec.rig.k_left, world_from_stereo,
                             spec.background_gray);
    frame.right = render_view(spec.boxes, spec.rig.k_right, world_from_right,
                              spec.background_gray);

    // Thermal channel.
    if (spec.thermal_kind == ThermalKind::EdgeMap) {
      const EdgeMap edges =
          rasterize_silhouettes(spec.boxes, spec.rig.k_thermal,
                                world_from_thermal);
      size_t edge_pixels = 0;
      for (uint8_t v : edges.data()) edge_pixels += (v != 0);
      if (edge_pixels == 0) {
        throw CalibError(ErrorCode::EmptyView,
                         "generate: empty thermal view in frame " + frame.id);
      }
      frame.thermal = edges;
    } else {
      size_t hit_pixels = 0;
      frame.thermal = render_view(spec.boxes, spec.rig.k_thermal,
                                  world_from_thermal, spec.background_gray,
                                  &hit_pixels);
      if (hit_pixels == 0) {
        throw CalibError(ErrorCode::EmptyView,
                         "generate: empty thermal view in frame " + frame.id);
      }
    }

    out.dataset.manifest.frame_ids.push_back(frame.id);
    out.dataset.frames.push_back(std::move(frame));
    out.extras.push_back(std::move(extras));
  }
  return out;
}

SynthOutput generate_to_disk(const SceneSpec& spec, int n_frames,
                             const std::filesystem::path& out_dir) {
  SynthOutput out = generate(spec, n_frames);
  write_dataset(out.dataset, out_dir);
  save_ground_truth(out.truth, out_dir / "ground_truth.json");
  return out;
}

// ---------------------------------------------------------------------------
// Scene spec JSON

namespace {

using nlohmann::json;

Pose pose_from_json(const json& j) {
  EulerPose e;
  e.x = j.value("x", 0.0);
  e.y = j.value("y", 0.0);
  e.z = j.value("z", 0.0);
  e.roll = j.value("roll_deg", 0.0);
  e.pitch = j.value("pitch_deg", 0.0);
  e.yaw = j.value("yaw_deg", 0.0);
  return e.to_pose();
}

PinholeIntrinsics intrinsics_from_json(const json& j) {
  PinholeIntrinsics k;
  k.fx = j.at("fx").get<double>();
  k.fy = j.at("fy").get<double>();
  k.cx = j.at("cx").get<double>();
  k.cy = j.at("cy").get<double>();
  k.width = j.at("width").get<int>();
  k.height = j.at("height").get<int>();
  return k;
}

}  // namespace

SceneSpec load_scene_spec(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw CalibError(ErrorCode::IoError,
                     "cannot open scene spec: " + path.string());
  }
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw CalibError(ErrorCode::ParseError,
                     path.string() + ": " + e.what());
  }
  try {
    SceneSpec spec;
    spec.seed = j.value("seed", 1ULL);
    spec.background_gray = static_cast<uint8_t>(j.value("background_gray", 30));
    spec.features_per_frame = j.value("features_per_frame", 350);
    const std::string kind = j.value("thermal_kind", "edge_map");
    if (kind != "edge_map" && kind != "intensity") {
      throw CalibError(ErrorCode::ValidationError,
                       "thermal_kind must be 'edge_map' or 'intensity'");
    }
    spec.thermal_kind = kind == "edge_map" ? ThermalKind::EdgeMap
                                           : ThermalKind::Intensity;
    for (const auto& bj : j.at("boxes")) {
      Box box;
      const auto& lo = bj.at("lo");
      const auto& hi = bj.at("hi");
      box.lo = Vec3(lo[0].get<double>(), lo[1].get<double>(),
                    lo[2].get<double>());
      box.hi = Vec3(hi[0].get<double>(), hi[1].get<double>(),
                    hi[2].get<double>());
      box.gray = static_cast<uint8_t>(bj.value("gray", 128));
      if ((box.hi - box.lo).minCoeff() < 0) {
        throw CalibError(ErrorCode::ValidationError,
                         "scene box with hi < lo");
      }
      spec.boxes.push_back(box);
    }
    const auto& rig = j.at("rig");
    spec.rig.t_sl = pose_from_json(rig.at("t_sl"));
    spec.rig.t_st = pose_from_json(rig.at("t_st"));
    if (rig.contains("t_lr")) {
      spec.rig.t_lr = pose_from_json(rig.at("t_lr"));
    } else {
      spec.rig.t_lr.translation = Vec3(rig.value("baseline_m", 0.2227), 0, 0);
    }
    spec.rig.k_left = intrinsics_from_json(rig.at("k_left"));
    spec.rig.k_right = intrinsics_from_json(rig.at("k_right"));
    spec.rig.k_thermal = intrinsics_from_json(rig.at("k_thermal"));
    if (rig.contains("laser")) {
      const auto& lj = rig.at("laser");
      spec.rig.laser.rings = lj.value("rings", 128);
      spec.rig.laser.cols = lj.value("cols", 1024);
      spec.rig.laser.vfov_deg = lj.value("vfov_deg", 90.0);
      spec.rig.laser.hfov_deg = lj.value("hfov_deg", 360.0);
      spec.rig.laser.max_range = lj.value("max_range", 120.0);
    }
    if (j.contains("noise")) {
      spec.noise.laser_sigma = j["noise"].value("laser_sigma", 0.0);
      spec.noise.stereo_sigma = j["noise"].value("stereo_sigma", 0.0);
    }
    if (j.contains("frames")) {
      for (const auto& fj : j["frames"]) {
        spec.frame_poses.push_back(pose_from_json(fj));
      }
    }
    return spec;
  } catch (const json::exception& e) {
    throw CalibError(ErrorCode::ParseError,
                     path.string() + ": " + e.what());
  }
}

}  // namespace mmcal

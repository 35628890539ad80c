#include "facewarp/annotations.hpp"

#include <fstream>
#include <set>
#include <stdexcept>

#include <json.hpp>

namespace facewarp {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& msg) {
  throw std::runtime_error("annotations: " + msg);
}

double focal_from_camera_json(const json& j, int width, int height, const std::string& where) {
  bool has_focal = j.contains("focal_px");
  bool has_dfov = j.contains("dfov_deg");
  if (has_focal == has_dfov)
    fail(where + ": exactly one of focal_px or dfov_deg is required");
  if (has_focal) return j.at("focal_px").get<double>();
  return focal_from_dfov(j.at("dfov_deg").get<double>(), width, height);
}

}  // namespace

VideoAnnotations load_annotations(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail("cannot open " + path);
  json doc;
  try {
    in >> doc;
  } catch (const json::parse_error& e) {
    fail("parse error in " + path + ": " + e.what());
  }

  if (!doc.contains("camera")) fail("missing camera block");
  const json& cam = doc.at("camera");

  VideoAnnotations ann;
  ann.camera.width_px = cam.at("width").get<int>();
  ann.camera.height_px = cam.at("height").get<int>();
  ann.camera.focal_px = focal_from_camera_json(cam, ann.camera.width_px, ann.camera.height_px, "camera");
  try {
    ann.camera.validate();
  } catch (const std::invalid_argument& e) {
    fail(e.what());
  }

  if (!doc.contains("frames") || !doc.at("frames").is_array() || doc.at("frames").empty())
    fail("missing or empty frames array");

  int n = 0;
  for (const json& jf : doc.at("frames")) {
    int index = jf.at("index").get<int>();
    if (index != n) fail("non-contiguous frame index " + std::to_string(index) +
                         " (expected " + std::to_string(n) + ")");
    FrameAnnotations frame;
    frame.index = index;

    std::set<int> face_ids;
    if (jf.contains("faces")) {
      for (const json& f : jf.at("faces")) {
        FaceAnnotation fa;
        fa.track_id = f.at("track_id").get<int>();
        if (!face_ids.insert(fa.track_id).second)
          fail("duplicate face track_id " + std::to_string(fa.track_id) +
               " in frame " + std::to_string(index));
        const json& bb = f.at("bbox");
        if (!bb.is_array() || bb.size() != 4)
          fail("frame " + std::to_string(index) + ": bbox must be [x,y,w,h]");
        fa.bbox = {bb[0].get<double>(), bb[1].get<double>(), bb[2].get<double>(), bb[3].get<double>()};
        fa.mask_path = f.at("mask").get<std::string>();
        frame.faces.push_back(std::move(fa));
      }
    }
    if (jf.contains("lines")) {
      std::set<int> line_ids;
      for (const json& l : jf.at("lines")) {
        LineAnnotation la;
        la.track_id = l.at("track_id").get<int>();
        if (!line_ids.insert(la.track_id).second)
          fail("duplicate line track_id " + std::to_string(la.track_id) +
               " in frame " + std::to_string(index));
        la.p0 = {l.at("p0")[0].get<double>(), l.at("p0")[1].get<double>()};
        la.p1 = {l.at("p1")[0].get<double>(), l.at("p1")[1].get<double>()};
        frame.lines.push_back(la);
      }
    }
    ann.frames.push_back(std::move(frame));
    ++n;
  }

  ann.per_frame_focal.assign(ann.frames.size(), ann.camera.focal_px);
  if (cam.contains("per_frame")) {
    for (const json& pf : cam.at("per_frame")) {
      int index = pf.at("index").get<int>();
      if (index < 0 || index >= ann.frame_count())
        fail("per_frame camera entry for out-of-range frame " + std::to_string(index));
      ann.per_frame_focal[index] =
          focal_from_camera_json(pf, ann.camera.width_px, ann.camera.height_px,
                                 "camera.per_frame[" + std::to_string(index) + "]");
      if (!(ann.per_frame_focal[index] > 0.0))
        fail("per_frame focal for frame " + std::to_string(index) + " must be positive");
    }
  }
  return ann;
}

void save_annotations(const std::string& path, const VideoAnnotations& ann) {
  json doc;
  doc["camera"] = {{"width", ann.camera.width_px},
                   {"height", ann.camera.height_px},
                   {"focal_px", ann.camera.focal_px}};
  json per_frame = json::array();
  for (int i = 0; i < ann.frame_count(); ++i) {
    if (ann.per_frame_focal[i] != ann.camera.focal_px)
      per_frame.push_back({{"index", i}, {"focal_px", ann.per_frame_focal[i]}});
  }
  if (!per_frame.empty()) doc["camera"]["per_frame"] = per_frame;

  doc["frames"] = json::array();
  for (const FrameAnnotations& f : ann.frames) {
    json jf;
    jf["index"] = f.index;
    jf["faces"] = json::array();
    for (const FaceAnnotation& fa : f.faces)
      jf["faces"].push_back({{"track_id", fa.track_id},
                             {"bbox", {fa.bbox.x, fa.bbox.y, fa.bbox.w, fa.bbox.h}},
                             {"mask", fa.mask_path}});
    jf["lines"] = json::array();
    for (const LineAnnotation& la : f.lines)
      jf["lines"].push_back({{"track_id", la.track_id},
                             {"p0", {la.p0.x, la.p0.y}},
                             {"p1", {la.p1.x, la.p1.y}}});
    doc["frames"].push_back(std::move(jf));
  }

  std::ofstream out(path);
  if (!out) fail("cannot write " + path);
  out << doc.dump(2) << "\n";
}

}  // namespace facewarp

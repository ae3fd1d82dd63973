// SPDX-FileCopyrightText: 2026 sage contributors
// SPDX-License-Identifier: Apache-2.0
#include <sage/grid_ops.hpp>
#include <sage/tracker.hpp>

#include <algorithm>
#include <cstdio>
#include <limits>

namespace sage {

std::vector<Cluster> extract_clusters(const GridU8& occupied) {
  auto [labels, count] = connected_components(occupied);
  std::vector<Cluster> out(static_cast<std::size_t>(count));
  for (int iy = 0; iy < occupied.height(); ++iy) {
    for (int ix = 0; ix < occupied.width(); ++ix) {
      const int id = labels(ix, iy);
      if (id < 0) continue;
      auto& cl = out[static_cast<std::size_t>(id)];
      cl.cells.emplace_back(ix, iy);
      cl.centroid += occupied.cellCenter(ix, iy);
      ++cl.cell_count;
    }
  }
  for (auto& cl : out) cl.centroid /= static_cast<double>(cl.cell_count);
  return out;
}

std::vector<Association> associate(const std::vector<Track>& tracks,
                                   const std::vector<Cluster>& clusters, double gate,
                                   double now) {
  struct Cand {
    double dist;
    int track_id;
    int cluster_index;
    std::size_t track_slot;
  };
  std::vector<Cand> cands;
  for (std::size_t ti = 0; ti < tracks.size(); ++ti) {
    const auto& t = tracks[ti];
    const Eigen::Vector2d pred = t.position + t.velocity * (now - t.last_seen);
    for (std::size_t ci = 0; ci < clusters.size(); ++ci) {
      const double d = (clusters[ci].centroid - pred).norm();
      if (d <= gate) cands.push_back({d, t.id, static_cast<int>(ci), ti});
    }
  }
  std::sort(cands.begin(), cands.end(), [](const Cand& a, const Cand& b) {
    if (a.dist != b.dist) return a.dist < b.dist;
    if (a.track_id != b.track_id) return a.track_id < b.track_id;
    return a.cluster_index < b.cluster_index;
  });

  std::vector<bool> track_used(tracks.size(), false), cluster_used(clusters.size(), false);
  std::vector<Association> pairs;
  for (const auto& c : cands) {
    if (track_used[c.track_slot] || cluster_used[static_cast<std::size_t>(c.cluster_index)])
      continue;
    track_used[c.track_slot] = true;
    cluster_used[static_cast<std::size_t>(c.cluster_index)] = true;
    pairs.push_back({c.track_id, c.cluster_index});
  }
  return pairs;
}

std::vector<Track> update_tracks(std::vector<Track> tracks,
                                 const std::vector<Association>& pairs,
                                 const std::vector<Cluster>& clusters,
                                 const std::vector<LabelObservation>& labels, double now,
                                 const TrackerParams& params, int& next_id) {
  const double alpha = params.alpha;
  std::vector<bool> cluster_matched(clusters.size(), false);

  for (const auto& pr : pairs) {
    auto it = std::find_if(tracks.begin(), tracks.end(),
                           [&](const Track& t) { return t.id == pr.track_id; });
    if (it == tracks.end()) continue;
    Track& t = *it;
    const Eigen::Vector2d c = clusters[static_cast<std::size_t>(pr.cluster_index)].centroid;
    const double dt = now - t.last_seen;
    const Eigen::Vector2d p_old = t.position;
    t.position = (1.0 - alpha) * p_old + alpha * c;
    if (dt > 0.0) {
      const Eigen::Vector2d raw = (t.position - p_old) / dt;
      t.velocity = (1.0 - alpha) * t.velocity + alpha * raw;
    }
    t.last_seen = now;
    cluster_matched[static_cast<std::size_t>(pr.cluster_index)] = true;
  }

  for (std::size_t ci = 0; ci < clusters.size(); ++ci) {
    if (cluster_matched[ci]) continue;
    Track t;
    t.id = next_id++;
    t.position = clusters[ci].centroid;
    t.last_seen = now;
    tracks.push_back(t);
  }

  for (const auto& lb : labels) {
    double best = params.gate;
    Track* hit = nullptr;
    for (auto& t : tracks) {
      const double d = (t.position - lb.position).norm();
      if (d < best || (d == best && (!hit || t.id < hit->id))) {
        best = d;
        hit = &t;
      }
    }
    if (hit) {
      hit->label = TrackLabel::Human;
      hit->last_labeled = now;
    }
  }

  std::erase_if(tracks, [&](const Track& t) { return now - t.last_seen > params.t_lost; });
  return tracks;
}

std::string tracks_csv_header() { return "t,id,x,y,vx,vy,label\n"; }

std::string tracks_csv_rows(double t, const std::vector<Track>& tracks) {
  std::string out;
  char buf[256];
  for (const auto& tr : tracks) {
    std::snprintf(buf, sizeof(buf), "%.17g,%d,%.17g,%.17g,%.17g,%.17g,%s\n", t, tr.id,
                  tr.position.x(), tr.position.y(), tr.velocity.x(), tr.velocity.y(),
                  tr.label == TrackLabel::Human ? "Human" : "Unknown");
    out += buf;
  }
  return out;
}

}  // namespace sage

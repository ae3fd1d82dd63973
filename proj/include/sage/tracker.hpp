// SPDX-FileCopyrightText: 2026 sage contributors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <sage/config.hpp>
#include <sage/grid.hpp>

#include <string>
#include <vector>

namespace sage {

enum class TrackLabel : std::uint8_t { Unknown = 0, Human = 1 };

struct Track {
  int id = 0;
  Eigen::Vector2d position{0.0, 0.0};
  Eigen::Vector2d velocity{0.0, 0.0};
  TrackLabel label = TrackLabel::Unknown;
  double last_seen = 0.0;
  double last_labeled = -1.0;  // negative: never labeled
};

struct Cluster {
  std::vector<Eigen::Vector2i> cells;  // (ix, iy)
  Eigen::Vector2d centroid{0.0, 0.0};
  int cell_count = 0;
};

struct Association {
  int track_id = 0;
  int cluster_index = 0;
};

// Human-labeled detection from the simulated camera.
struct LabelObservation {
  Eigen::Vector2d position{0.0, 0.0};
};

// Maximal 8-connected components of occupied cells, in scan order.
std::vector<Cluster> extract_clusters(const GridU8& occupied);

// Greedy matching over globally sorted (track, cluster) centroid distances.
// Track positions are predicted forward to `now` with their velocity. Ties
// break on (track id, cluster index). No pair exceeds `gate`.
std::vector<Association> associate(const std::vector<Track>& tracks,
                                   const std::vector<Cluster>& clusters, double gate,
                                   double now);

// Smooths matched tracks toward their cluster centroids, spawns tracks for
// unmatched clusters, applies Human labels to the nearest track within the
// gate, and prunes tracks unseen for more than t_lost. The velocity estimate
// smooths the increment of the smoothed position so it converges to the true
// cluster velocity.
std::vector<Track> update_tracks(std::vector<Track> tracks,
                                 const std::vector<Association>& pairs,
                                 const std::vector<Cluster>& clusters,
                                 const std::vector<LabelObservation>& labels, double now,
                                 const TrackerParams& params, int& next_id);

// CSV rows: t,id,x,y,vx,vy,label
std::string tracks_csv_header();
std::string tracks_csv_rows(double t, const std::vector<Track>& tracks);

}  // namespace sage

// Copyright 2026 The robosetup Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Runs the brute-force oracles once and writes their results as golden files.
// Not part of ctest: rerun by hand only when a fixture changes.
//
//   freeze_oracles <data dir> <golden dir>

#include <fstream>
#include <iostream>

#include <json.hpp>

#include "oracles.hpp"
#include "robosetup/robot_model.hpp"

int main(int argc, char** argv) {
  if (argc != 3) {
    std::cerr << "usage: freeze_oracles <data dir> <golden dir>\n";
    return 2;
  }
  const std::filesystem::path data = argv[1];
  const std::filesystem::path golden = argv[2];
  std::filesystem::create_directories(golden);

  nlohmann::ordered_json out = nlohmann::ordered_json::object();
  for (const char* fixture : {"two_link.urdf", "three_link_toy.urdf", "always_overlap.urdf", "planar_2link.urdf"}) {
    const auto model = robosetup::load_urdf_file(data / fixture);
    const auto counts = oracle::grid_pair_counts(model, 181);
    const auto classes = oracle::classify(counts);
    nlohmann::ordered_json pairs = nlohmann::ordered_json::array();
    for (const auto& [pair, hits] : counts.collisions) {
      pairs.push_back({{"link1", pair.first},
                       {"link2", pair.second},
                       {"collisions", hits},
                       {"default_collision", counts.default_collision.at(pair)},
                       {"class", classes.at(pair)}});
    }
    out[fixture] = {{"grid_steps", 181}, {"states", counts.states}, {"pairs", pairs}};
    std::cerr << fixture << ": " << counts.states << " states\n";
  }
  std::ofstream(golden / "acm_grid.json") << out.dump(2) << "\n";
  return 0;
}

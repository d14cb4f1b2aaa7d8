#pragma once

#include <string>
#include <vector>

#include "shuffleval/scenario.hpp"

namespace shuffleval {

struct FigurePreset {
    std::string name;
    std::string description;
};

const std::vector<FigurePreset>& figure_presets();

// Emits the data table behind the named preset figure (analytic columns,
// plus seeded simulated columns where defined). Unknown names raise a
// ScenarioError listing the valid presets.
ResultTable run_figure(const std::string& name, const RunOverrides& overrides = {});

}  // namespace shuffleval

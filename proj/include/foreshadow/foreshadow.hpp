#pragma once

#include "foreshadow/dataset.hpp"
#include "foreshadow/effects.hpp"
#include "foreshadow/events.hpp"
#include "foreshadow/export.hpp"
#include "foreshadow/json_io.hpp"
#include "foreshadow/scene.hpp"
#include "foreshadow/svg_renderer.hpp"
#include "foreshadow/timeline.hpp"

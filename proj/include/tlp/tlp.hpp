#pragma once

#include "field.hpp"
#include "field_io.hpp"
#include "json_io.hpp"
#include "landscape_profile.hpp"
#include "merge_tree.hpp"
#include "neighborhood_graph.hpp"
#include "pipeline.hpp"
#include "render.hpp"

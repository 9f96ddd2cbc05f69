#pragma once

#include "fracseg/error.hpp"
#include "fracseg/features.hpp"
#include "fracseg/io.hpp"
#include "fracseg/kdtree.hpp"
#include "fracseg/orientation.hpp"
#include "fracseg/pipeline.hpp"
#include "fracseg/point_cloud.hpp"
#include "fracseg/region_growing.hpp"
#include "fracseg/scenes.hpp"
#include "fracseg/stereonet_svg.hpp"
#include "fracseg/sym_eigen.hpp"
#include "fracseg/synth.hpp"
#include "fracseg/vec3.hpp"

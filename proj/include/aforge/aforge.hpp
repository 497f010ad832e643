#pragma once

#include "aforge/error.hpp"
#include "aforge/geometry.hpp"
#include "aforge/rng.hpp"
#include "aforge/parallel.hpp"
#include "aforge/maps.hpp"
#include "aforge/gftlab.hpp"
#include "aforge/system.hpp"
#include "aforge/attractor.hpp"
#include "aforge/perfectness.hpp"
#include "aforge/gallery.hpp"
#include "aforge/io.hpp"
#include "aforge/svg.hpp"
#include "aforge/pipeline.hpp"

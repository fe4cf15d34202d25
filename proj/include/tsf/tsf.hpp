#ifndef TSF_TSF_HPP
#define TSF_TSF_HPP

#include "common.hpp"
#include "rng.hpp"
#include "parallel.hpp"
#include "surface.hpp"
#include "homology.hpp"
#include "sl2.hpp"
#include "origami.hpp"
#include "triangulation.hpp"
#include "flat_geometry.hpp"
#include "billiards.hpp"
#include "drift.hpp"
#include "modular.hpp"
#include "catalog.hpp"
#include "csv.hpp"

#endif  // TSF_TSF_HPP

#pragma once

#include "bvh.hpp"
#include "config.hpp"
#include "ddg.hpp"
#include "dense.hpp"
#include "error.hpp"
#include "features.hpp"
#include "isoline.hpp"
#include "laplace.hpp"
#include "lineset_io.hpp"
#include "mesh.hpp"
#include "mesh_io.hpp"
#include "oracle.hpp"
#include "pipeline.hpp"
#include "shapes.hpp"
#include "smoothing.hpp"
#include "svg.hpp"
#include "vec.hpp"

#pragma once

#include "errors.hpp"
#include "real.hpp"
#include "int_matrix.hpp"
#include "linalg.hpp"
#include "polynomial.hpp"
#include "roots.hpp"
#include "smith.hpp"
#include "permutation.hpp"
#include "iet.hpp"
#include "fast_iet.hpp"
#include "rauzy.hpp"
#include "singularity.hpp"
#include "periodic.hpp"
#include "spectral.hpp"
#include "cocycle.hpp"
#include "towers.hpp"
#include "birkhoff.hpp"
#include "correction.hpp"
#include "ergodicity.hpp"
#include "rotation.hpp"
#include "special_flow.hpp"
#include "repro.hpp"

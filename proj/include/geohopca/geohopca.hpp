#pragma once

#include "geohopca/archive.hpp"
#include "geohopca/blo.hpp"
#include "geohopca/error.hpp"
#include "geohopca/npy.hpp"
#include "geohopca/pca.hpp"
#include "geohopca/rng.hpp"
#include "geohopca/select.hpp"
#include "geohopca/shopca.hpp"
#include "geohopca/support.hpp"
#include "geohopca/symmetric_eigen.hpp"
#include "geohopca/tensor.hpp"

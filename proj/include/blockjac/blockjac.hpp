#ifndef BLOCKJAC_BLOCKJAC_HPP
#define BLOCKJAC_BLOCKJAC_HPP

#include "config.hpp"
#include "errors.hpp"
#include "inverse.hpp"
#include "io.hpp"
#include "matrix.hpp"
#include "operator.hpp"
#include "random.hpp"
#include "spectral.hpp"
#include "tame.hpp"

#endif  // BLOCKJAC_BLOCKJAC_HPP

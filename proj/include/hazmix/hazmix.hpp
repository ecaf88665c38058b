#ifndef HAZMIX_HAZMIX_HPP
#define HAZMIX_HAZMIX_HPP

#include "hazmix/errors.hpp"
#include "hazmix/special.hpp"
#include "hazmix/quadrature.hpp"
#include "hazmix/survival.hpp"
#include "hazmix/polyapprox.hpp"
#include "hazmix/moments.hpp"
#include "hazmix/slice.hpp"
#include "hazmix/gibbs.hpp"
#include "hazmix/posterior_sampler.hpp"
#include "hazmix/inference.hpp"
#include "hazmix/validation.hpp"
#include "hazmix/data_io.hpp"
#include "hazmix/commands.hpp"

#endif  // HAZMIX_HAZMIX_HPP

#ifndef ATOMGREED_ATOMGREED_HPP
#define ATOMGREED_ATOMGREED_HPP

#include "atomgreed/errors.hpp"
#include "atomgreed/linalg.hpp"
#include "atomgreed/random.hpp"
#include "atomgreed/atoms.hpp"
#include "atomgreed/objectives.hpp"
#include "atomgreed/bounds.hpp"
#include "atomgreed/solvers.hpp"
#include "atomgreed/condnum.hpp"
#include "atomgreed/submod.hpp"
#include "atomgreed/io.hpp"

#endif  // ATOMGREED_ATOMGREED_HPP

#pragma once

#include "locc/catalog.hpp"
#include "locc/classify.hpp"
#include "locc/io.hpp"
#include "locc/linalg.hpp"
#include "locc/measurements.hpp"
#include "locc/optim.hpp"
#include "locc/protocols.hpp"
#include "locc/states.hpp"

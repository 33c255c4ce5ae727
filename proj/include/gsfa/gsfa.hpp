#pragma once

#include "gsfa/error.hpp"
#include "gsfa/graph.hpp"
#include "gsfa/random.hpp"
#include "gsfa/markov.hpp"
#include "gsfa/labels.hpp"
#include "gsfa/builders.hpp"
#include "gsfa/free_response.hpp"
#include "gsfa/solver.hpp"
#include "gsfa/expansion.hpp"
#include "gsfa/pca.hpp"
#include "gsfa/hierarchy.hpp"
#include "gsfa/estimators.hpp"
#include "gsfa/datagen.hpp"
#include "gsfa/io.hpp"
#include "gsfa/experiments.hpp"

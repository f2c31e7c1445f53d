#pragma once

#include "held/core.hpp"
#include "held/document.hpp"
#include "held/evaluation.hpp"
#include "held/features.hpp"
#include "held/heading.hpp"
#include "held/inference.hpp"
#include "held/io.hpp"
#include "held/linear_scorer.hpp"
#include "held/logistic.hpp"
#include "held/parallel.hpp"
#include "held/patterns.hpp"
#include "held/retrieval.hpp"
#include "held/scorer.hpp"
#include "held/synth.hpp"
#include "held/tree.hpp"
#include "held/tuples.hpp"

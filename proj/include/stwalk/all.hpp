#ifndef STWALK_ALL_HPP
#define STWALK_ALL_HPP

#include "baselines.hpp"
#include "common.hpp"
#include "embedding_io.hpp"
#include "evaluation.hpp"
#include "pipeline.hpp"
#include "skipgram.hpp"
#include "spacetime.hpp"
#include "stwalk.hpp"
#include "synth.hpp"
#include "temporal_graph.hpp"
#include "walks.hpp"

#endif

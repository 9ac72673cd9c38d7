#pragma once

// Umbrella header: field-specific word embeddings, semantic-shift scoring,
// and shift visualization.

#include "drift/corpus.hpp"
#include "drift/embed.hpp"
#include "drift/errors.hpp"
#include "drift/huffman.hpp"
#include "drift/pca.hpp"
#include "drift/pipeline.hpp"
#include "drift/scatter.hpp"
#include "drift/shift.hpp"
#include "drift/storyline.hpp"
#include "drift/svg.hpp"

#ifndef SPANFORGE_SPANFORGE_HPP
#define SPANFORGE_SPANFORGE_HPP

#include <spanforge/batch.hpp>
#include <spanforge/best.hpp>
#include <spanforge/corpus.hpp>
#include <spanforge/enumerate.hpp>
#include <spanforge/graph.hpp>
#include <spanforge/io.hpp>
#include <spanforge/linalg.hpp>
#include <spanforge/oracle.hpp>
#include <spanforge/random.hpp>
#include <spanforge/rational.hpp>
#include <spanforge/samplers.hpp>
#include <spanforge/suites.hpp>
#include <spanforge/tree_ops.hpp>
#include <spanforge/walks.hpp>

#endif

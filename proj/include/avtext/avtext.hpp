#pragma once

// Convenience umbrella for the whole toolkit.

#include "avtext/corpus.hpp"
#include "avtext/datis_rules.hpp"
#include "avtext/errors.hpp"
#include "avtext/eval.hpp"
#include "avtext/extractors.hpp"
#include "avtext/llm_client.hpp"
#include "avtext/metar.hpp"
#include "avtext/parsers.hpp"
#include "avtext/prompt.hpp"
#include "avtext/retrieval.hpp"
#include "avtext/runway.hpp"
#include "avtext/strings.hpp"
#include "avtext/synth.hpp"

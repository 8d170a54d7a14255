// SPDX-License-Identifier: Apache-2.0
//
// Hand-curated demonstration knowledge base: 13 garment categories, 5
// scenarios x 8 styles, coordination rules, outfit cases with embeddings.
// Used by the generator tool and by integration tests.

#pragma once

#include "stepo/kb.hpp"

namespace stepo {

KnowledgeBase make_sample_kb();

}  // namespace stepo

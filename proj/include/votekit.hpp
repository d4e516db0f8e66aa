/**
 * Copyright 2026 The votekit Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef VOTEKIT_VOTEKIT_HPP_
#define VOTEKIT_VOTEKIT_HPP_

#include "votekit/corpus.hpp"
#include "votekit/ensemble.hpp"
#include "votekit/error.hpp"
#include "votekit/features.hpp"
#include "votekit/members.hpp"
#include "votekit/metrics.hpp"
#include "votekit/probability_table.hpp"
#include "votekit/random.hpp"
#include "votekit/report.hpp"
#include "votekit/synthetic.hpp"
#include "votekit/tsv.hpp"

#endif  // VOTEKIT_VOTEKIT_HPP_

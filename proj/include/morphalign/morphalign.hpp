// Copyright 2026 The morphalign Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef MORPHALIGN_MORPHALIGN_HPP
#define MORPHALIGN_MORPHALIGN_HPP

#include "morphalign/aligner.hpp"
#include "morphalign/alignment_io.hpp"
#include "morphalign/analysis.hpp"
#include "morphalign/corpus.hpp"
#include "morphalign/errors.hpp"
#include "morphalign/model.hpp"
#include "morphalign/parallel.hpp"
#include "morphalign/scoring.hpp"
#include "morphalign/serialize.hpp"
#include "morphalign/tables.hpp"
#include "morphalign/training.hpp"

#endif  // MORPHALIGN_MORPHALIGN_HPP

/*
 * Copyright 2026 The ovrlogit Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include "ovrlogit/csv.hpp"
#include "ovrlogit/dataset.hpp"
#include "ovrlogit/error.hpp"
#include "ovrlogit/importance.hpp"
#include "ovrlogit/metrics.hpp"
#include "ovrlogit/ovr.hpp"
#include "ovrlogit/pipeline.hpp"
#include "ovrlogit/preprocess.hpp"
#include "ovrlogit/random.hpp"
#include "ovrlogit/report.hpp"
#include "ovrlogit/solvers.hpp"

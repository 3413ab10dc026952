// Copyright 2026 The qrem-bias Authors
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

#pragma once

#include "qrem/chem.hpp"
#include "qrem/circuit.hpp"
#include "qrem/density_matrix.hpp"
#include "qrem/error.hpp"
#include "qrem/experiments.hpp"
#include "qrem/fermion.hpp"
#include "qrem/nelder_mead.hpp"
#include "qrem/pauli.hpp"
#include "qrem/spam.hpp"
#include "qrem/stabilizer.hpp"

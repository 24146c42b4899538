// Copyright 2026 The PAIQA Toolkit Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// All prompt and instruction text lives here. "<image>" marks where an image
// attachment goes; callers split on it when building multimodal requests.

#ifndef PAIQA_CORE_PROMPTS_HPP_
#define PAIQA_CORE_PROMPTS_HPP_

#include <string>
#include <string_view>

#include "core/model.hpp"

namespace paiqa::prompts {

inline constexpr std::string_view kImageToken = "<image>";

// Subject recognition.
std::string subject_recognition();

// Edit-prompt generation; `type` is the task phrase ("style change").
std::string complex_edit_prompt(std::string_view type);
std::string simple_edit_prompt(std::string_view type);

std::string prompt_cleaning(std::string_view prompt);

// Three scrutiny questions, each answered yes (pass) or no (fail).
std::string scrutiny_visual_anomaly();
std::string scrutiny_prompt_clarity(std::string_view prompt);
std::string scrutiny_subject_alignment(std::string_view prompt);

// Grounding pairs.
std::string grounding_question();
std::string grounding_answer(std::string_view serialized_region);

// Quantitative pairs. `prior` is the embedded CoT text.
std::string harmony_prior_request();
std::string naturalness_prior_request();
inline constexpr std::string_view kNeutralHarmonyPrior =
    "The edited image shows no salient defects.";
inline constexpr std::string_view kNeutralNaturalnessPrior =
    "The edited area shows no salient defects.";
std::string harmony_question(std::string_view prior);
std::string naturalness_question(std::string_view prior);
std::string harmony_answer(QualityLevel level);
std::string naturalness_answer(QualityLevel level);

// Explanation pairs. The CoT requests are prefixed by the source/edited
// image pair and the edit prompt.
std::string cot_context(std::string_view prompt);
std::string cot_prompt_completion_request(int pc_level);
std::string cot_naturalness_request(QualityLevel level);
std::string cot_harmony_request(QualityLevel level);
std::string cot_validation_request(std::string_view dimension, std::string_view level_text,
                                   std::string_view explanation);
std::string explanation_question(std::string_view prompt);
std::string_view completion_phrase(int pc_level);

// Judge rubric text per dimension, and the full judge request.
std::string_view judge_rubric_pa();
std::string_view judge_rubric_lna();
std::string_view judge_rubric_gha();
std::string_view judge_rubric_overall();
std::string judge_request(std::string_view gold_answer, std::string_view model_response,
                          bool include_lna_gha);

// Scoring questions for scored models.
std::string harmony_scoring_question();
std::string naturalness_scoring_question();

}  // namespace paiqa::prompts

#endif  // PAIQA_CORE_PROMPTS_HPP_

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

#include "core/prompts.hpp"

namespace paiqa::prompts {
namespace {

std::string join(std::initializer_list<std::string_view> parts) {
  std::string out;
  for (std::string_view p : parts) out += p;
  return out;
}

// The templates supply their own punctuation after an embedded prompt.
std::string_view bare(std::string_view prompt) {
  while (!prompt.empty() && (prompt.back() == '.' || prompt.back() == ' ')) {
    prompt.remove_suffix(1);
  }
  return prompt;
}

// Degree phrase used by the level-conditioned CoT requests.
std::string_view degree_phrase(QualityLevel level) {
  switch (level) {
    case QualityLevel::Bad:
    case QualityLevel::Poor: return "a lower degree of";
    case QualityLevel::Fair: return "a moderate degree of";
    case QualityLevel::Good:
    case QualityLevel::Excellent: return "a high degree of";
  }
  return "";
}

}  // namespace

std::string subject_recognition() {
  return "What is the main object in this picture? Please describe it in one word. How many main "
         "objects are there in each image? When outputting, please separate the word description "
         "and quantity with | and without space, and the maximum quantity is 10.";
}

std::string complex_edit_prompt(std::string_view type) {
  return join({
      "Generate a prompt specially for image editing type: ", type,
      " for the subject in the frame. The prompt must meet the following criteria:\n",
      "1. Target Focus: The edit command must only apply to the main subject within the "
      "specified bounding box.\n",
      "2. Single Action Rule: Each prompt should include only one editing command and with only "
      "one simple editing action related to ", type, " per prompt.\n",
      "3. Simplicity: Use simple, easy-to-understand language. Avoid complex artistic, "
      "aesthetic, or material-specific terminology.\n",
      "4. Semantic Consistency: Ensure that after the edit, the subject's semantic or identity "
      "remains largely similar to the original. For example, if replacing a dog, acceptable "
      "alternatives could be a cat or another small quadrupedal mammal, but not a human or an "
      "inanimate object.\n",
      "5. Overall Image Harmony: The editing should keep the overall image semantically "
      "coherent. For instance, when modifying a face, instructions may specify a change to a "
      "ceramic-smooth texture, but avoid material changes (like wood) that would create "
      "noticeable discordance in the image.\n",
      "6. Generated prompt cannot contain box information.\n",
      "7. The prompt must be a concise sentence with only the action instruction itself and "
      "without extra prefix or suffix.",
  });
}

std::string simple_edit_prompt(std::string_view type) {
  return join({
      "Generate a prompt in the form of a noun specially for image editing type: ", type,
      " for the subject in the frame. The prompt must meet the following criteria:\n",
      "1. Generate prompts is edited results in the form of 'a' + noun, noun no more than one "
      "words.\n",
      "2. Focus only on the main object within the bounding box.\n",
      "3. Each prompt must contain only one editing command for the main object.\n",
      "4. Ensure the edited object retains a similar semantic meaning to the original (e.g., "
      "replace a dog with a cat or another breed, but not a human or inanimate object).\n",
      "5. Ensure the edited object maintains semantic harmony with the overall image (e.g., 'a "
      "porcelain-like face' is acceptable, but avoid unrealistic materials like wood).\n",
      "6. Generated prompt cannot contain box information.\n",
      "7. Only generate one prompt at a time.\n",
      "8. The content in prompt must be different from the original object in the box.",
  });
}

std::string prompt_cleaning(std::string_view prompt) {
  return join({
      "I have one picture with the boxed object and one corresponding image editing prompt: ",
      bare(prompt),
      ", which is used to edit the object in the box, but sometimes the prompt does not meet the "
      "requirements. Now please analyze the picture and prompt and modify the prompt according "
      "to the following suggestions:\n",
      "1. Analyze each prompt and identify the boxed object in the image.\n",
      "2. If the prompt requests editing multiple objects with different types, discard the "
      "objects outside the bounding box and keep only the editing instruct corresponding to the "
      "main object within the bounding box.\n",
      "3. If the prompt requests editing multiple objects of the same type (like two birds of "
      "the same species) but only one of them is boxed, please modify the prompt to focus on the "
      "boxed object by adding detailed semantic descriptions to highlight the boxed object (i.e. "
      "the bird in the left).\n",
      "4. For prompts which do not in the upper cases, please output the original prompt "
      "without any modification.\n",
      "5. Ensure the modified prompt applies the same editing action as the original given "
      "prompt but only to the boxed object.\n",
      "6. Output the modified prompts in a clear and concise format.\n",
      "7. Please simulate as if you are watching a picture without the bounding box, so do not "
      "mention any information related to the bounding box.\n",
      "8. The prompt must be a concise sentence which is the result prompt itself and without "
      "extra prefix or suffix.",
  });
}

std::string scrutiny_visual_anomaly() {
  return "The first image is the source image and the second image is the edited image. Are "
         "both images free of visual anomalies such as severe distortion, corrupted regions or "
         "broken structures? Answer yes or no.";
}

std::string scrutiny_prompt_clarity(std::string_view prompt) {
  return join({"The editing prompt is: ", bare(prompt),
               ". Is this prompt semantically clear, reasonable and executable as a local image "
               "edit? Answer yes or no."});
}

std::string scrutiny_subject_alignment(std::string_view prompt) {
  return join({"The image marks the edited region with a box. The editing prompt is: ", bare(prompt),
               ". Does the object the prompt asks to edit match the boxed object? Answer yes or "
               "no."});
}

std::string grounding_question() {
  return "The original image i: <image>, the image after partial editing is: <image>. Please "
         "output the representation of the local editing area. It is expressed as four decimals "
         "in the range [0,1] (as a percentage of the image), where the first two digits are the "
         "horizontal/vertical coordinates of the center point of the editing area, and the last "
         "two digits are the width/height coordinates of the size of the editing area";
}

std::string grounding_answer(std::string_view serialized_region) {
  return join({"The four coefficients representing the editing area are: <", serialized_region,
               ">."});
}

std::string harmony_prior_request() {
  return "Now there is a task of partial editing of an image. The edited image is: <image>. This "
         "image is considered having a lower degree of harmony between the edited area and the "
         "overall image, based on the given edited image, please analyze from the perspective of "
         "the edited image itself why the image editing having a lower degree of harmony between "
         "the edited area and the overall image. Please describe your analysis results in concise "
         "language, within two sentences.";
}

std::string naturalness_prior_request() {
  return "Now there is a task of partial editing of an image. The edited area is: <image>. This "
         "image is considered having a lower degree of naturalness in the edited area, based on "
         "the given edited area, please analyze from the perspective of the edited area itself "
         "why the image editing having a lower degree of naturalness in the edited area. Please "
         "describe your analysis results in concise language, within two sentences.";
}

std::string harmony_question(std::string_view prior) {
  return join({"The image after partial editing is: <image>. ", prior,
               " Please rate the harmony between the edited area and the overall edited image "
               "(There are 5 levels in total: bad, poor, fair, good, excellent). Then output the "
               "harmony level."});
}

std::string naturalness_question(std::string_view prior) {
  return join({"The editing area of image after partial editing is: <image>. ", prior,
               " Please rate the naturalness of the edited area (There are 5 levels in total: "
               "bad, poor, fair, good, excellent). Then output the naturalness level."});
}

std::string harmony_answer(QualityLevel level) {
  return join({"Harmony level is: ", level_word(level), "."});
}

std::string naturalness_answer(QualityLevel level) {
  return join({"Naturalness level is: ", level_word(level), "."});
}

std::string cot_context(std::string_view prompt) {
  return join({"The original image is: <image>, the image after partial editing is: <image>. The "
               "partial editing prompt is: ",
               bare(prompt), ". "});
}

std::string_view completion_phrase(int pc_level) {
  switch (pc_level) {
    case 1: return "non-completion";
    case 2: return "partial completion";
    default: return "full completion";
  }
}

std::string cot_prompt_completion_request(int pc_level) {
  std::string_view following = pc_level == 1   ? "not following prompt at all"
                               : pc_level == 2 ? "only partially following prompt"
                                               : "fully following prompt";
  return join({"This image is considered ", following,
               ", based on the given original image, the edited image and the editing "
               "instructions, please analyze from the perspective of the edited image itself why "
               "the image editing ",
               following,
               ". Please describe your analysis results in concise language, within two "
               "sentences."});
}

std::string cot_naturalness_request(QualityLevel level) {
  const std::string_view d = degree_phrase(level);
  return join({"This image is considered having ", d,
               " naturalness in the edit area, based on the given original image, the edited "
               "image and the editing instructions, please analyze from the perspective of the "
               "edited image itself why the image editing having ",
               d,
               " naturalness in the edit area. Please describe your analysis results in concise "
               "language, within two sentences."});
}

std::string cot_harmony_request(QualityLevel level) {
  const std::string_view d = degree_phrase(level);
  return join({"This image is considered having ", d,
               " harmony between the edited area and the overall image, based on the given "
               "original image, the edited image and the editing instructions, please analyze "
               "from the perspective of the edited image itself why the image editing having ",
               d,
               " harmony between the edited area and the overall image. Please describe your "
               "analysis results in concise language, within two sentences."});
}

std::string cot_validation_request(std::string_view dimension, std::string_view level_text,
                                   std::string_view explanation) {
  return join({"Human raters judged the ", dimension, " of this edit as: ", level_text,
               ". Another model wrote this explanation of the ", dimension, ": \"", explanation,
               "\". Given the images and the prompt, is this explanation reasonable and "
               "consistent with the human judgment? Answer yes or no."});
}

std::string explanation_question(std::string_view prompt) {
  return join({
      "The original image is: <image>, the image after partial editing is: <image>. The partial "
      "editing prompt is: ",
      bare(prompt),
      ". First, determine whether the prompt is followed. If not, analyze it and directly give "
      "the overall quality level as bad. If partially followed, analyze it and directly give the "
      "overall quality level as poor. If followed, first analyze the prompt completion, the local "
      "naturalness of the edited area and the overall harmony, then please give the final overall "
      "editing quality level based on the analysis and the overall presentation quality of the "
      "edited image.",
  });
}

std::string_view judge_rubric_pa() {
  return "If the judgment in the model response regarding whether the instructions are followed "
         "is consistent with the standard answer, and the analysis meaning is also consistent, "
         "assign 2 points. If the judgment is consistent, but there is a discrepancy in the "
         "analysis, assign 1 point. If the judgment differs, assign 0 points.";
}

std::string_view judge_rubric_lna() {
  return "If the analysis regarding naturalness in the model response is basically consistent "
         "with the standard answer, or if both the answer and the standard answer do not include "
         "an analysis of naturalness, assign 2 points. If there is some difference, but the "
         "overall judgment is consistent, assign 1 point. If there is a complete inconsistency "
         "(opposite meaning), or the standard answer includes an analysis of naturalness that the "
         "answer does not, assign 0 points.";
}

std::string_view judge_rubric_gha() {
  return "If the analysis regarding harmony in the model response is basically consistent with "
         "the standard answer, or if neither the answer nor the standard answer includes an "
         "analysis of harmony, assign 2 points. If there is some difference, but the overall "
         "judgment is consistent, assign 1 point. If there is a complete inconsistency (opposite "
         "meaning), or the standard answer includes an analysis of harmony that the answer does "
         "not, assign 0 points.";
}

std::string_view judge_rubric_overall() {
  return "If the overall editing quality level in the answer is essentially consistent with the "
         "standard answer (for example, 'good' and 'excellent,' or 'bad' and 'poor,' which are "
         "similar in meaning), and the overall summarization process is consistent, assign 2 "
         "points. If the overall editing effect level in the model response is essentially "
         "consistent with the standard answer, but there are differences in the process of "
         "summarizing the reasons for the editing effect level, assign 1 point. If the overall "
         "editing effect grade in the answer is inconsistent with the standard answer, assign 0 "
         "points.";
}

std::string judge_request(std::string_view gold_answer, std::string_view model_response,
                          bool include_lna_gha) {
  std::string out = join({
      "You are grading a model's explanation of the quality of a partially edited image against "
      "a standard answer.\nStandard answer: ",
      gold_answer, "\nModel response: ", model_response,
      "\nScore each dimension below with 0, 1 or 2 according to its criterion.\nPA: ",
      judge_rubric_pa(), "\n"});
  if (include_lna_gha) {
    out += join({"LNA: ", judge_rubric_lna(), "\nGHA: ", judge_rubric_gha(), "\n"});
  }
  out += join({"Overall: ", judge_rubric_overall(),
               "\nReply with one line per dimension in the form '<DIMENSION>: <score>'."});
  return out;
}

std::string harmony_scoring_question() {
  return "The image after partial editing is: <image>. Please rate the harmony between the "
         "edited area and the overall edited image (There are 5 levels in total: bad, poor, fair, "
         "good, excellent). Then output the harmony level.";
}

std::string naturalness_scoring_question() {
  return "The editing area of image after partial editing is: <image>. Please rate the "
         "naturalness of the edited area (There are 5 levels in total: bad, poor, fair, good, "
         "excellent). Then output the naturalness level.";
}

}  // namespace paiqa::prompts

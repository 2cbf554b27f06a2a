#ifndef APKFEAT_H
#define APKFEAT_H

/* Generated by cbindgen from src/lib.rs. Do not edit. */

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

typedef enum ApkfeatStatus {
  APKFEAT_STATUS_OK = 0,
  APKFEAT_STATUS_NULL_ARG = 1,
  APKFEAT_STATUS_INVALID_ARG = 2,
  APKFEAT_STATUS_IO = 3,
  APKFEAT_STATUS_APK = 4,
  APKFEAT_STATUS_DEX = 5,
  APKFEAT_STATUS_AXML = 6,
  APKFEAT_STATUS_DICT = 7,
  APKFEAT_STATUS_MODEL = 8,
  APKFEAT_STATUS_DIMENSION = 9,
  APKFEAT_STATUS_BUFFER_TOO_SMALL = 10,
  APKFEAT_STATUS_UTF8 = 11,
  APKFEAT_STATUS_PANIC = 12,
  APKFEAT_STATUS_INTERNAL = 13,
} ApkfeatStatus;

/*
 Opaque feature dictionary.
 */
typedef struct ApkfeatDictionary ApkfeatDictionary;

/*
 Opaque float or int8 model.
 */
typedef struct ApkfeatModel ApkfeatModel;

/*
 Verdict of one prediction.
 */
typedef struct ApkfeatScanResult {
  uint32_t class_index;
  /*
   Probability of `class_index`.
   */
  double confidence;
  bool is_benign;
  /*
   Set bits in the feature vector.
   */
  size_t features_present;
} ApkfeatScanResult;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Library version as a static NUL-terminated string.
 */
const char *apkfeat_version(void);

/*
 Message of the calling thread's last failure, or null if none. The
 pointer stays valid until the next failing call on this thread.
 */
const char *apkfeat_last_error_message(void);

/*
 Loads a dictionary file into `*out`.

 # Safety
 `path` is a NUL-terminated string; `out` is writable.
 */
enum ApkfeatStatus apkfeat_dictionary_load(const char *path, struct ApkfeatDictionary **out);

/*
 Number of features, or 0 for a null handle.

 # Safety
 `dict` is null or a live handle.
 */
size_t apkfeat_dictionary_len(const struct ApkfeatDictionary *dict);

/*
 # Safety
 `dict` is null or a handle from `apkfeat_dictionary_load` not yet freed.
 */
void apkfeat_dictionary_free(struct ApkfeatDictionary *dict);

/*
 Loads a float or int8 model file into `*out`.

 # Safety
 `path` is a NUL-terminated string; `out` is writable.
 */
enum ApkfeatStatus apkfeat_model_load(const char *path, struct ApkfeatModel **out);

/*
 Converts a float model to int8 in place. A no-op for int8 models.

 # Safety
 `model` is a live handle not used by any other thread during the call.
 */
enum ApkfeatStatus apkfeat_model_quantize(struct ApkfeatModel *model);

/*
 Input width, or 0 for a null handle.

 # Safety
 `model` is null or a live handle.
 */
size_t apkfeat_model_input_dim(const struct ApkfeatModel *model);

/*
 Number of classes, or 0 for a null handle.

 # Safety
 `model` is null or a live handle.
 */
size_t apkfeat_model_num_classes(const struct ApkfeatModel *model);

/*
 True if the model runs int8 weights; false for a null handle.

 # Safety
 `model` is null or a live handle.
 */
bool apkfeat_model_is_quantized(const struct ApkfeatModel *model);

/*
 Copies the NUL-terminated label of class `index` into `buf`. `*needed`
 receives the required size including the terminator; with a short
 buffer nothing is written and `BUFFER_TOO_SMALL` is returned.

 # Safety
 `model` is a live handle, `buf` is writable for `buf_len` bytes or null
 when `buf_len` is 0, and `needed` is null or writable.
 */
enum ApkfeatStatus apkfeat_model_label(const struct ApkfeatModel *model,
                                       size_t index,
                                       char *buf,
                                       size_t buf_len,
                                       size_t *needed);

/*
 # Safety
 `model` is null or a handle from `apkfeat_model_load` not yet freed.
 */
void apkfeat_model_free(struct ApkfeatModel *model);

/*
 Extracts, vectorizes and classifies the APK at `path`.

 # Safety
 `model` and `dict` are live handles, `path` is a NUL-terminated string
 and `out` is writable.
 */
enum ApkfeatStatus apkfeat_scan(const struct ApkfeatModel *model,
                                const struct ApkfeatDictionary *dict,
                                const char *path,
                                struct ApkfeatScanResult *out);

/*
 Writes the APK's presence vector over `dict` as one byte (0 or 1) per
 feature. `*written` receives the dictionary size; with a short buffer
 nothing is written and `BUFFER_TOO_SMALL` is returned.

 # Safety
 `dict` is a live handle, `path` is a NUL-terminated string, `buf` is
 writable for `buf_len` bytes or null when `buf_len` is 0, and `written`
 is null or writable.
 */
enum ApkfeatStatus apkfeat_extract_vector(const struct ApkfeatDictionary *dict,
                                          const char *path,
                                          uint8_t *buf,
                                          size_t buf_len,
                                          size_t *written);

/*
 Classifies a presence vector of `len` bytes, each 0 or 1.

 # Safety
 `model` is a live handle, `bits` is readable for `len` bytes and `out`
 is writable.
 */
enum ApkfeatStatus apkfeat_predict_vector(const struct ApkfeatModel *model,
                                          const uint8_t *bits,
                                          size_t len,
                                          struct ApkfeatScanResult *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* APKFEAT_H */

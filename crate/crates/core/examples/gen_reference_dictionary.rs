//! Regenerates the reference dictionary files under `data/`.
//!
//! ```text
//! cargo run -p apkfeat --example gen_reference_dictionary [-- <out-dir>]
//! ```
//!
//! Outputs:
//! - `dict-base.txt`: 1,509 API calls + 613 manifest properties
//!   (324 permissions, 213 intent actions, 76 hardware features).
//! - `behavior-delta.txt`: 46 API calls, their class paths as package
//!   prefixes, and 12 manifest properties.
//! - `api-universe.txt`: the corpus call list that the package prefixes are
//!   expanded against.
//! - `dict-full.txt`: the base updated with the delta, 2,290 + 625.
//!
//! Identifiers are real platform names where available. Manifest lists are
//! topped up with `placeholder.*` names once real names run out, and API
//! entries pair real classes with a shared method vocabulary. Only the
//! counts and the update arithmetic are meaningful.

use std::collections::BTreeSet;
use std::path::PathBuf;

use apkfeat::dex::ApiCall;
use apkfeat::dictionary::{
    BehaviorDelta, FeatureDictionary, FeatureEntry, FeatureKind, Origin, PruneConfig,
};

const BASE_API: usize = 1509;
const BASE_PERMISSIONS: usize = 324;
const BASE_INTENTS: usize = 213;
const BASE_HARDWARE: usize = 76;
const EXPANDED_API: usize = 781;

/// Calls distilled from behavior reports.
const DELTA_CALLS: &[(&str, &[&str])] = &[
    ("android/telephony/SmsManager", &["sendTextMessage", "sendMultipartTextMessage", "sendDataMessage", "divideMessage", "getDefault"]),
    ("android/telephony/TelephonyManager", &["getDeviceId", "getSubscriberId", "getSimSerialNumber", "getLine1Number", "getNetworkOperator", "getSimOperator", "getCellLocation", "listen"]),
    ("android/app/admin/DevicePolicyManager", &["lockNow", "resetPassword", "wipeData", "isAdminActive"]),
    ("dalvik/system/DexClassLoader", &["<init>", "loadClass"]),
    ("java/lang/Runtime", &["exec", "getRuntime"]),
    ("java/lang/ProcessBuilder", &["start"]),
    ("javax/crypto/Cipher", &["getInstance", "doFinal", "init"]),
    ("android/location/LocationManager", &["getLastKnownLocation", "requestLocationUpdates"]),
    ("android/content/pm/PackageManager", &["getInstalledPackages", "getInstalledApplications", "setComponentEnabledSetting"]),
    ("android/content/ContentResolver", &["query", "delete"]),
    ("android/media/AudioRecord", &["startRecording"]),
    ("android/media/MediaRecorder", &["setAudioSource", "start"]),
    ("android/hardware/Camera", &["open", "takePicture"]),
    ("android/accounts/AccountManager", &["getAccounts"]),
    ("android/app/ActivityManager", &["getRunningTasks", "killBackgroundProcesses"]),
    ("android/net/Uri", &["parse"]),
    ("android/net/wifi/WifiManager", &["getConnectionInfo", "setWifiEnabled"]),
    ("java/lang/reflect/Method", &["invoke"]),
    ("android/app/AlarmManager", &["setRepeating"]),
    ("android/app/KeyguardManager", &["newKeyguardLock"]),
];

const DELTA_MANIFEST: &[(FeatureKind, &str)] = &[
    (FeatureKind::Permission, "android.permission.BIND_ACCESSIBILITY_SERVICE"),
    (FeatureKind::Permission, "android.permission.BIND_DEVICE_ADMIN"),
    (FeatureKind::Permission, "android.permission.BIND_NOTIFICATION_LISTENER_SERVICE"),
    (FeatureKind::Permission, "android.permission.PACKAGE_USAGE_STATS"),
    (FeatureKind::Permission, "android.permission.REQUEST_INSTALL_PACKAGES"),
    (FeatureKind::Permission, "android.permission.SYSTEM_ALERT_WINDOW"),
    (FeatureKind::IntentAction, "android.app.action.DEVICE_ADMIN_ENABLED"),
    (FeatureKind::IntentAction, "android.intent.action.USER_PRESENT"),
    (FeatureKind::IntentAction, "android.provider.Telephony.SMS_DELIVER"),
    (FeatureKind::IntentAction, "android.service.notification.NotificationListenerService"),
    (FeatureKind::HardwareFeature, "android.hardware.telephony.gsm"),
    (FeatureKind::HardwareFeature, "android.hardware.camera.front"),
];

/// Platform calls with their real method names.
const CURATED: &[(&str, &[&str])] = &[
    ("android/app/Activity", &["finish", "getIntent", "onCreate", "onDestroy", "onPause", "onResume", "setContentView", "startActivity", "startActivityForResult", "startService", "getSystemService", "getPackageManager", "getApplicationContext", "registerReceiver", "unregisterReceiver"]),
    ("android/app/Service", &["onCreate", "onDestroy", "onStartCommand", "stopSelf", "startForeground", "stopForeground", "getApplication"]),
    ("android/app/NotificationManager", &["notify", "cancel", "cancelAll", "createNotificationChannel"]),
    ("android/app/PendingIntent", &["getActivity", "getBroadcast", "getService", "send", "cancel"]),
    ("android/app/IntentService", &["onHandleIntent", "setIntentRedelivery"]),
    ("android/content/Context", &["getSystemService", "startService", "stopService", "sendBroadcast", "registerReceiver", "getSharedPreferences", "openFileOutput", "openFileInput", "getFilesDir", "getCacheDir", "getContentResolver", "getPackageName", "getAssets", "bindService", "checkCallingOrSelfPermission", "getDir", "deleteFile", "getExternalFilesDir"]),
    ("android/content/Intent", &["<init>", "setAction", "setClass", "setComponent", "setData", "setFlags", "addFlags", "putExtra", "getAction", "getExtras", "getStringExtra", "setType", "addCategory", "getData", "setPackage"]),
    ("android/content/BroadcastReceiver", &["onReceive", "abortBroadcast", "getResultData", "setResultData", "goAsync"]),
    ("android/content/ComponentName", &["<init>", "getClassName", "getPackageName", "flattenToString"]),
    ("android/content/SharedPreferences", &["edit", "getString", "getBoolean", "getInt", "getLong", "contains", "getAll"]),
    ("android/content/SharedPreferences$Editor", &["putString", "putBoolean", "putInt", "putLong", "commit", "apply", "remove", "clear"]),
    ("android/content/ContentValues", &["<init>", "put", "get", "getAsString"]),
    ("android/content/pm/PackageInfo", &["<init>"]),
    ("android/content/pm/ApplicationInfo", &["loadLabel", "loadIcon"]),
    ("android/database/Cursor", &["moveToFirst", "moveToNext", "getString", "getInt", "getLong", "getColumnIndex", "getCount", "close", "isAfterLast"]),
    ("android/database/sqlite/SQLiteDatabase", &["execSQL", "rawQuery", "insert", "update", "delete", "query", "openOrCreateDatabase", "beginTransaction", "endTransaction", "setTransactionSuccessful", "close"]),
    ("android/database/sqlite/SQLiteOpenHelper", &["getWritableDatabase", "getReadableDatabase", "close"]),
    ("android/os/Build", &["<init>"]),
    ("android/os/Bundle", &["<init>", "get", "getString", "putString", "getInt", "putInt", "keySet", "containsKey"]),
    ("android/os/Environment", &["getExternalStorageDirectory", "getExternalStorageState", "getDataDirectory", "getDownloadCacheDirectory", "getRootDirectory"]),
    ("android/os/Handler", &["<init>", "post", "postDelayed", "sendMessage", "sendEmptyMessage", "removeCallbacks", "obtainMessage", "sendMessageDelayed"]),
    ("android/os/Looper", &["getMainLooper", "myLooper", "prepare", "loop"]),
    ("android/os/PowerManager", &["newWakeLock", "isScreenOn", "reboot"]),
    ("android/os/PowerManager$WakeLock", &["acquire", "release", "isHeld"]),
    ("android/os/Process", &["myPid", "killProcess", "myUid"]),
    ("android/os/SystemClock", &["sleep", "elapsedRealtime", "uptimeMillis"]),
    ("android/os/Vibrator", &["vibrate", "cancel"]),
    ("android/provider/Settings$Secure", &["getString", "getInt"]),
    ("android/provider/Settings$System", &["getString", "getInt", "putInt"]),
    ("android/util/Base64", &["decode", "encode", "encodeToString"]),
    ("android/util/Log", &["d", "e", "i", "v", "w"]),
    ("android/webkit/WebView", &["loadUrl", "addJavascriptInterface", "getSettings", "setWebViewClient", "loadData", "evaluateJavascript"]),
    ("android/webkit/WebSettings", &["setJavaScriptEnabled", "setAllowFileAccess", "setDomStorageEnabled"]),
    ("android/net/ConnectivityManager", &["getActiveNetworkInfo", "getNetworkInfo", "getAllNetworkInfo"]),
    ("android/net/NetworkInfo", &["isConnected", "getType", "isAvailable", "getTypeName"]),
    ("android/bluetooth/BluetoothAdapter", &["getDefaultAdapter", "enable", "disable", "isEnabled", "getAddress", "getBondedDevices", "startDiscovery"]),
    ("android/media/AudioManager", &["setRingerMode", "getRingerMode", "setStreamVolume", "getStreamVolume", "setSpeakerphoneOn"]),
    ("android/media/MediaPlayer", &["create", "start", "stop", "release", "setDataSource", "prepare"]),
    ("java/io/File", &["<init>", "exists", "delete", "mkdirs", "listFiles", "getAbsolutePath", "createNewFile", "length", "isDirectory", "getName", "renameTo", "setExecutable"]),
    ("java/io/FileInputStream", &["<init>", "read", "close"]),
    ("java/io/FileOutputStream", &["<init>", "write", "close", "flush"]),
    ("java/io/InputStream", &["read", "close", "available"]),
    ("java/io/OutputStream", &["write", "flush", "close"]),
    ("java/io/BufferedReader", &["<init>", "readLine", "close"]),
    ("java/io/DataOutputStream", &["<init>", "writeBytes", "flush", "close"]),
    ("java/lang/Class", &["forName", "getMethod", "getDeclaredMethod", "newInstance", "getName", "getClassLoader", "getDeclaredField"]),
    ("java/lang/ClassLoader", &["loadClass", "getSystemClassLoader", "getParent"]),
    ("java/lang/System", &["loadLibrary", "load", "currentTimeMillis", "exit", "getProperty", "arraycopy", "nanoTime"]),
    ("java/lang/Thread", &["<init>", "start", "sleep", "currentThread", "interrupt", "join", "setDaemon"]),
    ("java/lang/Process", &["getInputStream", "getOutputStream", "waitFor", "destroy", "getErrorStream"]),
    ("java/lang/String", &["getBytes", "equals", "substring", "indexOf", "split", "replace", "toLowerCase", "trim", "valueOf", "format", "contains", "startsWith"]),
    ("java/lang/StringBuilder", &["<init>", "append", "toString", "length", "reverse"]),
    ("java/lang/reflect/Field", &["get", "set", "setAccessible", "getInt"]),
    ("java/lang/reflect/Constructor", &["newInstance", "setAccessible"]),
    ("java/net/URL", &["<init>", "openConnection", "openStream", "getHost"]),
    ("java/net/HttpURLConnection", &["setRequestMethod", "getResponseCode", "getInputStream", "getOutputStream", "setDoOutput", "setRequestProperty", "connect", "disconnect", "setConnectTimeout"]),
    ("java/net/Socket", &["<init>", "getInputStream", "getOutputStream", "close", "connect"]),
    ("java/net/URLEncoder", &["encode"]),
    ("java/net/InetAddress", &["getByName", "getHostAddress", "getLocalHost"]),
    ("java/security/MessageDigest", &["getInstance", "digest", "update", "reset"]),
    ("java/util/Timer", &["<init>", "schedule", "scheduleAtFixedRate", "cancel"]),
    ("java/util/zip/ZipInputStream", &["<init>", "getNextEntry", "read", "close"]),
    ("java/util/zip/GZIPInputStream", &["<init>", "read"]),
    ("javax/crypto/spec/SecretKeySpec", &["<init>"]),
    ("javax/crypto/spec/IvParameterSpec", &["<init>"]),
    ("javax/crypto/KeyGenerator", &["getInstance", "init", "generateKey"]),
    ("org/apache/http/impl/client/DefaultHttpClient", &["<init>", "execute", "getParams"]),
    ("org/apache/http/client/methods/HttpPost", &["<init>", "setEntity", "setHeader"]),
    ("org/apache/http/client/methods/HttpGet", &["<init>", "setHeader"]),
    ("org/json/JSONObject", &["<init>", "put", "getString", "getInt", "getJSONArray", "toString", "has", "optString"]),
    ("org/json/JSONArray", &["<init>", "length", "getJSONObject", "put", "getString"]),
];

/// Further platform classes. Entries past what the API budget needs are unused.
const PLATFORM_CLASSES: &[&str] = &[
    "android/accessibilityservice/AccessibilityService", "android/accessibilityservice/AccessibilityServiceInfo",
    "android/app/AlertDialog", "android/app/AlertDialog$Builder", "android/app/Application", "android/app/Dialog",
    "android/app/DownloadManager", "android/app/DownloadManager$Request", "android/app/Fragment", "android/app/Instrumentation",
    "android/app/Notification", "android/app/Notification$Builder", "android/app/ProgressDialog", "android/app/TabActivity",
    "android/app/WallpaperManager", "android/app/job/JobInfo", "android/app/job/JobScheduler", "android/app/job/JobService",
    "android/app/usage/UsageStatsManager", "android/appwidget/AppWidgetManager", "android/appwidget/AppWidgetProvider",
    "android/bluetooth/BluetoothDevice", "android/bluetooth/BluetoothGatt", "android/bluetooth/BluetoothManager",
    "android/bluetooth/BluetoothSocket", "android/content/AsyncQueryHandler", "android/content/ClipData",
    "android/content/ClipboardManager", "android/content/ContentProvider", "android/content/ContentUris",
    "android/content/ContextWrapper", "android/content/DialogInterface", "android/content/IntentFilter",
    "android/content/ServiceConnection", "android/content/SyncAdapterType", "android/content/UriMatcher",
    "android/content/pm/ActivityInfo", "android/content/pm/PackageInstaller", "android/content/pm/ResolveInfo",
    "android/content/pm/ServiceInfo", "android/content/pm/Signature", "android/content/res/AssetManager",
    "android/content/res/Configuration", "android/content/res/Resources", "android/database/ContentObserver",
    "android/database/DatabaseUtils", "android/database/MatrixCursor", "android/database/sqlite/SQLiteStatement",
    "android/hardware/Sensor", "android/hardware/SensorEvent", "android/hardware/SensorManager",
    "android/hardware/camera2/CameraDevice", "android/hardware/camera2/CameraManager", "android/hardware/display/DisplayManager",
    "android/hardware/fingerprint/FingerprintManager", "android/hardware/usb/UsbDevice", "android/hardware/usb/UsbManager",
    "android/location/Address", "android/location/Criteria", "android/location/Geocoder", "android/location/Location",
    "android/media/AudioFormat", "android/media/AudioTrack", "android/media/ExifInterface", "android/media/MediaMetadataRetriever",
    "android/media/RingtoneManager", "android/media/SoundPool", "android/media/projection/MediaProjection",
    "android/media/projection/MediaProjectionManager", "android/net/DhcpInfo", "android/net/LocalServerSocket",
    "android/net/LocalSocket", "android/net/Network", "android/net/NetworkCapabilities", "android/net/NetworkRequest",
    "android/net/Proxy", "android/net/SSLCertificateSocketFactory", "android/net/TrafficStats", "android/net/VpnService",
    "android/net/http/AndroidHttpClient", "android/net/nsd/NsdManager", "android/net/wifi/ScanResult",
    "android/net/wifi/WifiConfiguration", "android/net/wifi/WifiInfo", "android/net/wifi/p2p/WifiP2pManager",
    "android/nfc/NfcAdapter", "android/nfc/NdefMessage", "android/nfc/Tag", "android/os/AsyncTask", "android/os/BatteryManager",
    "android/os/Binder", "android/os/CountDownTimer", "android/os/Debug", "android/os/FileObserver", "android/os/HandlerThread",
    "android/os/IBinder", "android/os/Message", "android/os/Messenger", "android/os/Parcel", "android/os/ParcelFileDescriptor",
    "android/os/RecoverySystem", "android/os/RemoteException", "android/os/ResultReceiver", "android/os/StatFs",
    "android/os/StrictMode", "android/os/UserManager", "android/os/storage/StorageManager", "android/preference/PreferenceManager",
    "android/provider/Browser", "android/provider/CalendarContract", "android/provider/CallLog$Calls",
    "android/provider/ContactsContract", "android/provider/ContactsContract$CommonDataKinds$Phone",
    "android/provider/ContactsContract$Contacts", "android/provider/MediaStore", "android/provider/MediaStore$Images$Media",
    "android/provider/Settings", "android/provider/Telephony$Sms", "android/provider/Telephony$Sms$Intents",
    "android/security/KeyChain", "android/security/keystore/KeyGenParameterSpec", "android/service/notification/StatusBarNotification",
    "android/speech/SpeechRecognizer", "android/speech/tts/TextToSpeech", "android/telecom/TelecomManager",
    "android/telephony/CellInfo", "android/telephony/PhoneNumberUtils", "android/telephony/PhoneStateListener",
    "android/telephony/ServiceState", "android/telephony/SignalStrength", "android/telephony/SmsMessage",
    "android/telephony/SubscriptionManager", "android/telephony/gsm/GsmCellLocation", "android/util/DisplayMetrics",
    "android/util/JsonReader", "android/util/Pair", "android/util/SparseArray", "android/util/Xml",
    "android/webkit/CookieManager", "android/webkit/JavascriptInterface", "android/webkit/ValueCallback",
    "android/webkit/WebChromeClient", "android/webkit/WebViewClient", "com/android/internal/telephony/ITelephony",
    "dalvik/system/BaseDexClassLoader", "dalvik/system/DexFile", "dalvik/system/PathClassLoader", "dalvik/system/VMRuntime",
    "java/io/BufferedInputStream", "java/io/BufferedOutputStream", "java/io/BufferedWriter", "java/io/ByteArrayInputStream",
    "java/io/ByteArrayOutputStream", "java/io/DataInputStream", "java/io/FileReader", "java/io/FileWriter",
    "java/io/InputStreamReader", "java/io/ObjectInputStream", "java/io/ObjectOutputStream", "java/io/OutputStreamWriter",
    "java/io/PrintWriter", "java/io/RandomAccessFile", "java/lang/Boolean", "java/lang/Byte", "java/lang/Character",
    "java/lang/Double", "java/lang/Enum", "java/lang/Exception", "java/lang/Float", "java/lang/Integer", "java/lang/Long",
    "java/lang/Math", "java/lang/Number", "java/lang/Object", "java/lang/Short", "java/lang/StringBuffer",
    "java/lang/ThreadLocal", "java/lang/Throwable", "java/lang/ref/WeakReference", "java/lang/reflect/Array",
    "java/lang/reflect/Modifier", "java/lang/reflect/Proxy", "java/net/DatagramPacket", "java/net/DatagramSocket",
    "java/net/InetSocketAddress", "java/net/NetworkInterface", "java/net/ServerSocket", "java/net/URI",
    "java/net/URLConnection", "java/net/URLDecoder", "java/nio/ByteBuffer", "java/nio/channels/FileChannel",
    "java/nio/charset/Charset", "java/security/KeyFactory", "java/security/KeyPairGenerator", "java/security/KeyStore",
    "java/security/SecureRandom", "java/security/Signature", "java/security/cert/CertificateFactory",
    "java/security/spec/X509EncodedKeySpec", "java/text/SimpleDateFormat", "java/util/ArrayList", "java/util/Arrays",
    "java/util/Calendar", "java/util/Collections", "java/util/Date", "java/util/Enumeration", "java/util/HashMap",
    "java/util/HashSet", "java/util/Iterator", "java/util/LinkedList", "java/util/List", "java/util/Locale",
    "java/util/Map", "java/util/Properties", "java/util/Random", "java/util/Scanner", "java/util/Set",
    "java/util/StringTokenizer", "java/util/TimerTask", "java/util/UUID", "java/util/Vector",
    "java/util/concurrent/ConcurrentHashMap", "java/util/concurrent/ExecutorService", "java/util/concurrent/Executors",
    "java/util/concurrent/ThreadPoolExecutor", "java/util/concurrent/TimeUnit", "java/util/jar/JarFile",
    "java/util/regex/Matcher", "java/util/regex/Pattern", "java/util/zip/CRC32", "java/util/zip/Deflater",
    "java/util/zip/Inflater", "java/util/zip/ZipEntry", "java/util/zip/ZipFile", "java/util/zip/ZipOutputStream",
    "javax/crypto/Mac", "javax/crypto/SecretKeyFactory", "javax/crypto/spec/PBEKeySpec", "javax/net/ssl/HttpsURLConnection",
    "javax/net/ssl/SSLContext", "javax/net/ssl/SSLSocketFactory", "javax/net/ssl/TrustManagerFactory",
    "javax/net/ssl/X509TrustManager", "org/apache/http/HttpEntity", "org/apache/http/HttpResponse",
    "org/apache/http/NameValuePair", "org/apache/http/StatusLine", "org/apache/http/client/HttpClient",
    "org/apache/http/client/entity/UrlEncodedFormEntity", "org/apache/http/entity/StringEntity",
    "org/apache/http/message/BasicNameValuePair", "org/apache/http/params/BasicHttpParams",
    "org/apache/http/params/HttpConnectionParams", "org/apache/http/util/EntityUtils", "org/json/JSONTokener",
    "org/w3c/dom/Document", "org/w3c/dom/Element", "org/w3c/dom/NodeList", "org/xml/sax/InputSource",
    "org/xmlpull/v1/XmlPullParser",
];

/// Methods every class inherits from `java/lang/Object`, plus constructors.
const OBJECT_METHODS: &[&str] = &["<init>", "equals", "getClass", "hashCode", "notify", "notifyAll", "toString", "wait"];

/// Method vocabulary for package-prefix expansion, in priority order.
const EXPANSION_METHODS: &[&str] = &[
    "<init>", "toString", "hashCode", "equals", "getClass", "notify", "notifyAll", "wait", "finalize", "clone",
    "describeContents", "writeToParcel", "getState", "getType", "getName", "getId", "isEnabled", "setEnabled",
    "getInstance", "getDefault", "from", "create", "close", "release", "cancel", "register", "unregister",
    "addListener", "removeListener", "getStatus", "setCallback", "getFlags", "setFlags", "getExtras", "setExtras",
    "getInfo", "getAll", "getCount", "getValue", "setValue", "isAvailable", "isSupported", "getVersion",
    "getTimestamp", "getPackageName", "checkPermission", "getService", "getContext", "reset", "update",
];

const PERMISSIONS: &[&str] = &[
    "ACCEPT_HANDOVER", "ACCESS_BACKGROUND_LOCATION", "ACCESS_CHECKIN_PROPERTIES", "ACCESS_COARSE_LOCATION",
    "ACCESS_FINE_LOCATION", "ACCESS_LOCATION_EXTRA_COMMANDS", "ACCESS_MEDIA_LOCATION", "ACCESS_MOCK_LOCATION",
    "ACCESS_NETWORK_STATE", "ACCESS_NOTIFICATION_POLICY", "ACCESS_SURFACE_FLINGER", "ACCESS_WIFI_STATE",
    "ACCOUNT_MANAGER", "ACTIVITY_RECOGNITION", "ADD_VOICEMAIL", "ANSWER_PHONE_CALLS", "AUTHENTICATE_ACCOUNTS",
    "BATTERY_STATS", "BIND_APPWIDGET", "BIND_AUTOFILL_SERVICE", "BIND_CARRIER_MESSAGING_SERVICE",
    "BIND_CARRIER_SERVICES", "BIND_CHOOSER_TARGET_SERVICE", "BIND_CONDITION_PROVIDER_SERVICE",
    "BIND_DREAM_SERVICE", "BIND_INCALL_SERVICE", "BIND_INPUT_METHOD", "BIND_JOB_SERVICE", "BIND_MIDI_DEVICE_SERVICE",
    "BIND_NFC_SERVICE", "BIND_PRINT_SERVICE", "BIND_QUICK_SETTINGS_TILE", "BIND_REMOTEVIEWS",
    "BIND_SCREENING_SERVICE", "BIND_TELECOM_CONNECTION_SERVICE", "BIND_TEXT_SERVICE", "BIND_TV_INPUT",
    "BIND_VISUAL_VOICEMAIL_SERVICE", "BIND_VOICE_INTERACTION", "BIND_VPN_SERVICE", "BIND_VR_LISTENER_SERVICE",
    "BIND_WALLPAPER", "BLUETOOTH", "BLUETOOTH_ADMIN", "BLUETOOTH_ADVERTISE", "BLUETOOTH_CONNECT",
    "BLUETOOTH_PRIVILEGED", "BLUETOOTH_SCAN", "BODY_SENSORS", "BROADCAST_PACKAGE_REMOVED", "BROADCAST_SMS",
    "BROADCAST_STICKY", "BROADCAST_WAP_PUSH", "CALL_COMPANION_APP", "CALL_PHONE", "CALL_PRIVILEGED", "CAMERA",
    "CAPTURE_AUDIO_OUTPUT", "CHANGE_COMPONENT_ENABLED_STATE", "CHANGE_CONFIGURATION", "CHANGE_NETWORK_STATE",
    "CHANGE_WIFI_MULTICAST_STATE", "CHANGE_WIFI_STATE", "CLEAR_APP_CACHE", "CONTROL_LOCATION_UPDATES",
    "DELETE_CACHE_FILES", "DELETE_PACKAGES", "DIAGNOSTIC", "DISABLE_KEYGUARD", "DUMP", "EXPAND_STATUS_BAR",
    "FACTORY_TEST", "FLASHLIGHT", "FOREGROUND_SERVICE", "GET_ACCOUNTS", "GET_ACCOUNTS_PRIVILEGED",
    "GET_PACKAGE_SIZE", "GET_TASKS", "GLOBAL_SEARCH", "HIDE_OVERLAY_WINDOWS", "INSTALL_LOCATION_PROVIDER",
    "INSTALL_PACKAGES", "INSTALL_SHORTCUT", "INSTANT_APP_FOREGROUND_SERVICE", "INTERNET",
    "KILL_BACKGROUND_PROCESSES", "LOCATION_HARDWARE", "MANAGE_ACCOUNTS", "MANAGE_DOCUMENTS",
    "MANAGE_EXTERNAL_STORAGE", "MANAGE_OWN_CALLS", "MASTER_CLEAR", "MEDIA_CONTENT_CONTROL", "MODIFY_AUDIO_SETTINGS",
    "MODIFY_PHONE_STATE", "MOUNT_FORMAT_FILESYSTEMS", "MOUNT_UNMOUNT_FILESYSTEMS", "NFC", "NFC_TRANSACTION_EVENT",
    "PERSISTENT_ACTIVITY", "PROCESS_OUTGOING_CALLS", "QUERY_ALL_PACKAGES", "READ_CALENDAR", "READ_CALL_LOG",
    "READ_CONTACTS", "READ_EXTERNAL_STORAGE", "READ_FRAME_BUFFER", "READ_HISTORY_BOOKMARKS", "READ_INPUT_STATE",
    "READ_LOGS", "READ_PHONE_NUMBERS", "READ_PHONE_STATE", "READ_PRECISE_PHONE_STATE", "READ_PROFILE",
    "READ_SETTINGS", "READ_SMS", "READ_SOCIAL_STREAM", "READ_SYNC_SETTINGS", "READ_SYNC_STATS",
    "READ_USER_DICTIONARY", "READ_VOICEMAIL", "REBOOT", "RECEIVE_BOOT_COMPLETED", "RECEIVE_MMS", "RECEIVE_SMS",
    "RECEIVE_WAP_PUSH", "RECORD_AUDIO", "REORDER_TASKS", "REQUEST_COMPANION_RUN_IN_BACKGROUND",
    "REQUEST_COMPANION_USE_DATA_IN_BACKGROUND", "REQUEST_DELETE_PACKAGES", "REQUEST_IGNORE_BATTERY_OPTIMIZATIONS",
    "RESTART_PACKAGES", "SCHEDULE_EXACT_ALARM", "SEND_RESPOND_VIA_MESSAGE", "SEND_SMS", "SET_ALARM",
    "SET_ALWAYS_FINISH", "SET_ANIMATION_SCALE", "SET_DEBUG_APP", "SET_PREFERRED_APPLICATIONS",
    "SET_PROCESS_LIMIT", "SET_TIME", "SET_TIME_ZONE", "SET_WALLPAPER", "SET_WALLPAPER_HINTS",
    "SIGNAL_PERSISTENT_PROCESSES", "STATUS_BAR", "SUBSCRIBED_FEEDS_READ", "SUBSCRIBED_FEEDS_WRITE",
    "TRANSMIT_IR", "UNINSTALL_SHORTCUT", "UPDATE_DEVICE_STATS", "USE_BIOMETRIC", "USE_CREDENTIALS",
    "USE_FINGERPRINT", "USE_FULL_SCREEN_INTENT", "USE_SIP", "VIBRATE", "WAKE_LOCK", "WRITE_APN_SETTINGS",
    "WRITE_CALENDAR", "WRITE_CALL_LOG", "WRITE_CONTACTS", "WRITE_EXTERNAL_STORAGE", "WRITE_GSERVICES",
    "WRITE_HISTORY_BOOKMARKS", "WRITE_PROFILE", "WRITE_SECURE_SETTINGS", "WRITE_SETTINGS", "WRITE_SMS",
    "WRITE_SOCIAL_STREAM", "WRITE_SYNC_SETTINGS", "WRITE_USER_DICTIONARY", "WRITE_VOICEMAIL",
];

const OTHER_PERMISSIONS: &[&str] = &[
    "com.android.alarm.permission.SET_ALARM", "com.android.browser.permission.READ_HISTORY_BOOKMARKS",
    "com.android.browser.permission.WRITE_HISTORY_BOOKMARKS", "com.android.launcher.permission.INSTALL_SHORTCUT",
    "com.android.launcher.permission.READ_SETTINGS", "com.android.launcher.permission.UNINSTALL_SHORTCUT",
    "com.android.launcher.permission.WRITE_SETTINGS", "com.android.vending.BILLING", "com.android.vending.CHECK_LICENSE",
    "com.android.voicemail.permission.ADD_VOICEMAIL", "com.google.android.c2dm.permission.RECEIVE",
    "com.google.android.finsky.permission.BIND_GET_INSTALL_REFERRER_SERVICE",
    "com.google.android.gms.permission.ACTIVITY_RECOGNITION", "com.google.android.providers.gsf.permission.READ_GSERVICES",
    "com.anddoes.launcher.permission.UPDATE_COUNT", "com.htc.launcher.permission.READ_SETTINGS",
    "com.htc.launcher.permission.UPDATE_SHORTCUT", "com.huawei.android.launcher.permission.CHANGE_BADGE",
    "com.huawei.android.launcher.permission.READ_SETTINGS", "com.huawei.android.launcher.permission.WRITE_SETTINGS",
    "com.majeur.launcher.permission.UPDATE_BADGE", "com.oppo.launcher.permission.READ_SETTINGS",
    "com.oppo.launcher.permission.WRITE_SETTINGS", "com.sec.android.provider.badge.permission.READ",
    "com.sec.android.provider.badge.permission.WRITE", "com.sonyericsson.home.permission.BROADCAST_BADGE",
    "com.sonymobile.home.permission.PROVIDER_INSERT_BADGE", "me.everything.badger.permission.BADGE_COUNT_READ",
    "me.everything.badger.permission.BADGE_COUNT_WRITE",
];

const INTENT_ACTIONS: &[&str] = &[
    "android.intent.action.AIRPLANE_MODE", "android.intent.action.ALL_APPS", "android.intent.action.ANSWER",
    "android.intent.action.APPLICATION_RESTRICTIONS_CHANGED", "android.intent.action.APP_ERROR",
    "android.intent.action.ASSIST", "android.intent.action.ATTACH_DATA", "android.intent.action.BATTERY_CHANGED",
    "android.intent.action.BATTERY_LOW", "android.intent.action.BATTERY_OKAY", "android.intent.action.BOOT_COMPLETED",
    "android.intent.action.BUG_REPORT", "android.intent.action.CALL", "android.intent.action.CALL_BUTTON",
    "android.intent.action.CAMERA_BUTTON", "android.intent.action.CHOOSER", "android.intent.action.CLOSE_SYSTEM_DIALOGS",
    "android.intent.action.CONFIGURATION_CHANGED", "android.intent.action.CREATE_DOCUMENT",
    "android.intent.action.CREATE_SHORTCUT", "android.intent.action.DATE_CHANGED", "android.intent.action.DEFAULT",
    "android.intent.action.DELETE", "android.intent.action.DEVICE_STORAGE_LOW", "android.intent.action.DEVICE_STORAGE_OK",
    "android.intent.action.DIAL", "android.intent.action.DOCK_EVENT", "android.intent.action.DREAMING_STARTED",
    "android.intent.action.DREAMING_STOPPED", "android.intent.action.EDIT", "android.intent.action.EXTERNAL_APPLICATIONS_AVAILABLE",
    "android.intent.action.EXTERNAL_APPLICATIONS_UNAVAILABLE", "android.intent.action.FACTORY_TEST",
    "android.intent.action.GET_CONTENT", "android.intent.action.GTALK_SERVICE_CONNECTED",
    "android.intent.action.GTALK_SERVICE_DISCONNECTED", "android.intent.action.HEADSET_PLUG",
    "android.intent.action.INPUT_METHOD_CHANGED", "android.intent.action.INSERT", "android.intent.action.INSERT_OR_EDIT",
    "android.intent.action.INSTALL_PACKAGE", "android.intent.action.LOCALE_CHANGED", "android.intent.action.LOCKED_BOOT_COMPLETED",
    "android.intent.action.MAIN", "android.intent.action.MANAGED_PROFILE_ADDED", "android.intent.action.MANAGE_NETWORK_USAGE",
    "android.intent.action.MANAGE_PACKAGE_STORAGE", "android.intent.action.MEDIA_BAD_REMOVAL",
    "android.intent.action.MEDIA_BUTTON", "android.intent.action.MEDIA_CHECKING", "android.intent.action.MEDIA_EJECT",
    "android.intent.action.MEDIA_MOUNTED", "android.intent.action.MEDIA_NOFS", "android.intent.action.MEDIA_REMOVED",
    "android.intent.action.MEDIA_SCANNER_FINISHED", "android.intent.action.MEDIA_SCANNER_SCAN_FILE",
    "android.intent.action.MEDIA_SCANNER_STARTED", "android.intent.action.MEDIA_SHARED", "android.intent.action.MEDIA_UNMOUNTABLE",
    "android.intent.action.MEDIA_UNMOUNTED", "android.intent.action.MY_PACKAGE_REPLACED", "android.intent.action.NEW_OUTGOING_CALL",
    "android.intent.action.OPEN_DOCUMENT", "android.intent.action.OPEN_DOCUMENT_TREE", "android.intent.action.PACKAGE_ADDED",
    "android.intent.action.PACKAGE_CHANGED", "android.intent.action.PACKAGE_DATA_CLEARED",
    "android.intent.action.PACKAGE_FIRST_LAUNCH", "android.intent.action.PACKAGE_FULLY_REMOVED",
    "android.intent.action.PACKAGE_INSTALL", "android.intent.action.PACKAGE_NEEDS_VERIFICATION",
    "android.intent.action.PACKAGE_REMOVED", "android.intent.action.PACKAGE_REPLACED", "android.intent.action.PACKAGE_RESTARTED",
    "android.intent.action.PACKAGE_VERIFIED", "android.intent.action.PASTE", "android.intent.action.PHONE_STATE",
    "android.intent.action.PICK", "android.intent.action.PICK_ACTIVITY", "android.intent.action.POWER_CONNECTED",
    "android.intent.action.POWER_DISCONNECTED", "android.intent.action.POWER_USAGE_SUMMARY",
    "android.intent.action.PROVIDER_CHANGED", "android.intent.action.QUICKBOOT_POWERON", "android.intent.action.REBOOT",
    "android.intent.action.RESPOND_VIA_MESSAGE", "android.intent.action.RUN", "android.intent.action.SCREEN_OFF",
    "android.intent.action.SCREEN_ON", "android.intent.action.SEARCH", "android.intent.action.SEARCH_LONG_PRESS",
    "android.intent.action.SEND", "android.intent.action.SENDTO", "android.intent.action.SEND_MULTIPLE",
    "android.intent.action.SET_WALLPAPER", "android.intent.action.SHUTDOWN", "android.intent.action.SYNC",
    "android.intent.action.SYSTEM_TUTORIAL", "android.intent.action.TIMEZONE_CHANGED", "android.intent.action.TIME_SET",
    "android.intent.action.TIME_TICK", "android.intent.action.UID_REMOVED", "android.intent.action.UMS_CONNECTED",
    "android.intent.action.UMS_DISCONNECTED", "android.intent.action.UNINSTALL_PACKAGE", "android.intent.action.USER_BACKGROUND",
    "android.intent.action.USER_FOREGROUND", "android.intent.action.USER_INITIALIZE", "android.intent.action.USER_UNLOCKED",
    "android.intent.action.VIEW", "android.intent.action.VOICE_COMMAND", "android.intent.action.WALLPAPER_CHANGED",
    "android.intent.action.WEB_SEARCH", "android.app.action.ACTION_PASSWORD_CHANGED", "android.app.action.ACTION_PASSWORD_EXPIRING",
    "android.app.action.ACTION_PASSWORD_FAILED", "android.app.action.ACTION_PASSWORD_SUCCEEDED",
    "android.app.action.DEVICE_ADMIN_DISABLED", "android.app.action.DEVICE_ADMIN_DISABLE_REQUESTED",
    "android.app.action.PROFILE_PROVISIONING_COMPLETE", "android.appwidget.action.APPWIDGET_DELETED",
    "android.appwidget.action.APPWIDGET_DISABLED", "android.appwidget.action.APPWIDGET_ENABLED",
    "android.appwidget.action.APPWIDGET_UPDATE", "android.bluetooth.a2dp.profile.action.CONNECTION_STATE_CHANGED",
    "android.bluetooth.adapter.action.DISCOVERY_FINISHED", "android.bluetooth.adapter.action.DISCOVERY_STARTED",
    "android.bluetooth.adapter.action.STATE_CHANGED", "android.bluetooth.device.action.ACL_CONNECTED",
    "android.bluetooth.device.action.ACL_DISCONNECTED", "android.bluetooth.device.action.BOND_STATE_CHANGED",
    "android.bluetooth.device.action.FOUND", "android.bluetooth.headset.profile.action.CONNECTION_STATE_CHANGED",
    "android.hardware.action.NEW_PICTURE", "android.hardware.action.NEW_VIDEO", "android.media.AUDIO_BECOMING_NOISY",
    "android.media.RINGER_MODE_CHANGED", "android.media.VOLUME_CHANGED_ACTION", "android.media.action.IMAGE_CAPTURE",
    "android.media.action.VIDEO_CAPTURE", "android.net.conn.BACKGROUND_DATA_SETTING_CHANGED",
    "android.net.conn.CONNECTIVITY_CHANGE", "android.net.wifi.NETWORK_IDS_CHANGED", "android.net.wifi.RSSI_CHANGED",
    "android.net.wifi.SCAN_RESULTS", "android.net.wifi.STATE_CHANGE", "android.net.wifi.WIFI_STATE_CHANGED",
    "android.net.wifi.p2p.CONNECTION_STATE_CHANGE", "android.net.wifi.supplicant.CONNECTION_CHANGE",
    "android.net.wifi.supplicant.STATE_CHANGE", "android.nfc.action.NDEF_DISCOVERED", "android.nfc.action.TAG_DISCOVERED",
    "android.nfc.action.TECH_DISCOVERED", "android.provider.Telephony.SIM_FULL", "android.provider.Telephony.SMS_CB_RECEIVED",
    "android.provider.Telephony.SMS_RECEIVED", "android.provider.Telephony.SMS_REJECTED",
    "android.provider.Telephony.WAP_PUSH_DELIVER", "android.provider.Telephony.WAP_PUSH_RECEIVED",
    "android.speech.tts.TTS_QUEUE_PROCESSING_COMPLETED", "android.speech.tts.engine.TTS_DATA_INSTALLED",
    "android.intent.action.ACTION_POWER_CONNECTED", "android.intent.action.ACTION_POWER_DISCONNECTED",
    "android.intent.action.ACTION_SHUTDOWN", "android.intent.action.DATA_SMS_RECEIVED", "android.intent.action.SIM_STATE_CHANGED",
    "android.intent.action.SERVICE_STATE", "android.intent.action.ANY_DATA_STATE", "android.intent.action.NOTIFICATION_ADD",
    "android.intent.action.NOTIFICATION_REMOVE", "android.intent.action.NOTIFICATION_UPDATE", "android.intent.action.PRE_BOOT_COMPLETED",
    "android.accessibilityservice.AccessibilityService", "android.service.wallpaper.WallpaperService",
    "android.view.InputMethod", "android.net.VpnService", "android.telecom.InCallService",
    "com.google.android.c2dm.intent.RECEIVE", "com.google.android.c2dm.intent.REGISTRATION",
    "com.google.firebase.MESSAGING_EVENT", "com.google.firebase.INSTANCE_ID_EVENT",
    "com.android.vending.INSTALL_REFERRER", "com.android.launcher.action.INSTALL_SHORTCUT",
    "com.android.launcher.action.UNINSTALL_SHORTCUT", "com.htc.intent.action.QUICKBOOT_POWERON",
];

const HARDWARE_FEATURES: &[&str] = &[
    "audio.low_latency", "audio.output", "audio.pro", "biometrics.face", "bluetooth", "bluetooth_le", "camera",
    "camera.any", "camera.autofocus", "camera.capability.manual_post_processing",
    "camera.capability.manual_sensor", "camera.capability.raw", "camera.external",
    "camera.flash", "camera.level.full", "consumerir", "faketouch", "faketouch.multitouch.distinct",
    "faketouch.multitouch.jazzhand", "fingerprint", "gamepad", "identity_credential", "input.keyboard",
    "location", "location.gps", "location.network", "microphone", "nfc", "nfc.hce", "nfc.hcef",
    "opengles.aep", "ram.low", "ram.normal", "screen.landscape", "screen.portrait", "security.model.compatible",
    "sensor.accelerometer", "sensor.ambient_temperature", "sensor.barometer", "sensor.compass", "sensor.gyroscope",
    "sensor.heartrate", "sensor.heartrate.ecg", "sensor.hifi_sensors", "sensor.hinge_angle", "sensor.light",
    "sensor.proximity", "sensor.relative_humidity", "sensor.stepcounter", "sensor.stepdetector", "strongbox_keystore",
    "telephony", "telephony.cdma", "telephony.euicc", "telephony.mbms", "touchscreen",
    "touchscreen.multitouch", "touchscreen.multitouch.distinct", "touchscreen.multitouch.jazzhand",
    "type.automotive", "type.embedded", "type.pc", "type.television", "type.watch", "usb.accessory", "usb.host",
    "vr.headtracking", "vr.high_performance", "vulkan.compute", "vulkan.level", "vulkan.version", "wifi",
    "wifi.aware", "wifi.direct", "wifi.passpoint", "wifi.rtt",
];

fn descriptor(path: &str) -> String {
    format!("L{path};")
}

/// Real names first, then `placeholder.<ns>.<NNNN>` until `want` entries.
fn fill(real: Vec<String>, exclude: &BTreeSet<String>, want: usize, ns: &str) -> Vec<String> {
    let mut out: Vec<String> = real.into_iter().filter(|s| !exclude.contains(s)).collect();
    out.sort();
    out.dedup();
    assert!(out.len() <= want, "{ns}: {} real names exceed the budget of {want}", out.len());
    let mut i = 1;
    while out.len() < want {
        out.push(format!("placeholder.{ns}.P{i:04}"));
        i += 1;
    }
    out
}

/// `(file name, contents)` of every reference file.
pub fn generate() -> Vec<(&'static str, String)> {

    let delta_calls: BTreeSet<ApiCall> = DELTA_CALLS
        .iter()
        .flat_map(|(class, methods)| methods.iter().map(move |m| ApiCall::new(&descriptor(class), m)))
        .collect();
    assert_eq!(delta_calls.len(), 46);
    let prefixes: BTreeSet<String> = DELTA_CALLS.iter().map(|(c, _)| (*c).to_owned()).collect();
    let under_prefix = |class: &str| prefixes.iter().any(|p| class.starts_with(&format!("L{p}")));

    // Base API calls: curated, then a few inherited calls on prefix classes
    // (so the update must deduplicate), then inherited calls on the rest.
    let rules = PruneConfig::default();
    let mut base_api: BTreeSet<ApiCall> = BTreeSet::new();
    for (class, methods) in CURATED {
        for m in *methods {
            base_api.insert(ApiCall::new(&descriptor(class), m));
        }
    }
    let overlap: BTreeSet<ApiCall> = prefixes
        .iter()
        .flat_map(|p| ["hashCode", "toString"].map(|m| ApiCall::new(&descriptor(p), m)))
        .collect();
    base_api.extend(overlap.iter().cloned());
    'fill: for m in OBJECT_METHODS {
        for class in PLATFORM_CLASSES {
            if base_api.len() == BASE_API {
                break 'fill;
            }
            let call = ApiCall::new(&descriptor(class), m);
            if !under_prefix(call.class_descriptor()) {
                base_api.insert(call);
            }
        }
    }
    assert_eq!(base_api.len(), BASE_API, "not enough platform classes for the API budget");
    assert!(base_api.is_disjoint(&delta_calls));
    let dropped: Vec<&ApiCall> = base_api.iter().filter(|c| !rules.keeps(c)).collect();
    assert!(dropped.is_empty(), "base contains calls the pruning rules drop: {dropped:?}");

    // Universe: the delta calls, base overlap, exactly enough new calls under
    // the prefixes, and calls the expansion must ignore.
    let mut universe: BTreeSet<ApiCall> = delta_calls.union(&overlap).cloned().collect();
    let need = EXPANDED_API - delta_calls.len();
    let mut expansion = 0;
    'expand: for m in EXPANSION_METHODS {
        for p in &prefixes {
            if expansion == need {
                break 'expand;
            }
            let call = ApiCall::new(&descriptor(p), m);
            if !base_api.contains(&call) && !delta_calls.contains(&call) && universe.insert(call) {
                expansion += 1;
            }
        }
    }
    assert_eq!(expansion, need, "expansion vocabulary too small");
    for class in PLATFORM_CLASSES.iter().map(|c| descriptor(c)).filter(|c| !under_prefix(c)) {
        for m in ["<init>", "toString", "getClass"] {
            universe.insert(ApiCall::new(&class, m));
        }
    }
    for noise in [
        "La/a;->a", "La/b;->c", "Lb/a/b;->d", "Lcom/squareup/okhttp/OkHttpClient;->newCall",
        "Lcom/google/gson/Gson;->toJson", "Landroid/view/View;->setVisibility", "Landroid/widget/TextView;->setText",
    ] {
        universe.insert(ApiCall::parse(noise).unwrap());
    }

    let delta_manifest: BTreeSet<(FeatureKind, String)> =
        DELTA_MANIFEST.iter().map(|(k, v)| (*k, (*v).to_owned())).collect();
    let delta_names: BTreeSet<String> = delta_manifest.iter().map(|(_, v)| v.clone()).collect();
    let mut perms: Vec<String> = PERMISSIONS.iter().map(|p| format!("android.permission.{p}")).collect();
    perms.extend(OTHER_PERMISSIONS.iter().map(|p| (*p).to_owned()));
    let permissions = fill(perms, &delta_names, BASE_PERMISSIONS, "permission");
    let intents = fill(INTENT_ACTIONS.iter().map(|s| (*s).to_owned()).collect(), &delta_names, BASE_INTENTS, "intent");
    let hardware = fill(
        HARDWARE_FEATURES.iter().map(|f| format!("android.hardware.{f}")).collect(),
        &delta_names,
        BASE_HARDWARE,
        "hardware",
    );

    let mut entries: Vec<FeatureEntry> =
        base_api.iter().map(|c| FeatureEntry::new(FeatureKind::ApiCall, c.canonical(), Origin::Corpus)).collect();
    for (kind, names) in [
        (FeatureKind::Permission, &permissions),
        (FeatureKind::IntentAction, &intents),
        (FeatureKind::HardwareFeature, &hardware),
    ] {
        entries.extend(names.iter().map(|n| FeatureEntry::new(kind, n.as_str(), Origin::Documentation)));
    }
    let base = FeatureDictionary::from_entries("1", entries).expect("valid base dictionary");
    assert_eq!((base.api_count(), base.manifest_count()), (1509, 613));

    let delta = BehaviorDelta { new_api_calls: delta_calls, new_packages: prefixes.clone(), new_manifest: delta_manifest };
    let full = base.update_with_behaviors(&delta, &universe);
    assert_eq!((full.api_count(), full.manifest_count(), full.len()), (2290, 625, 2915));

    let mut universe_text = String::from("# corpus API universe for package-prefix expansion\n");
    for c in &universe {
        universe_text.push_str(c.canonical());
        universe_text.push('\n');
    }
    vec![
        ("dict-base.txt", base.to_text()),
        ("behavior-delta.txt", delta.to_text()),
        ("api-universe.txt", universe_text),
        ("dict-full.txt", full.to_text()),
    ]
}

fn main() {
    let out_dir = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data"));
    std::fs::create_dir_all(&out_dir).expect("create output directory");
    for (name, text) in generate() {
        std::fs::write(out_dir.join(name), &text).expect("write reference file");
        println!("{name}: {} lines", text.lines().count());
    }
}

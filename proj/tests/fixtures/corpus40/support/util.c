/* util line 1 */
/* util line 2 */
/* util line 3 */
/* util line 4 */
/* util line 5 */
/* util line 6 */
/* util line 7 */
/* util line 8 */
/* util line 9 */
/* util line 10 */
